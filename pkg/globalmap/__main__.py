import sys

from globalmap.main import run

sys.exit(run())
