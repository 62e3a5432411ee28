from globalmap.commands.simulate import simulate
from globalmap.commands.build import build
from globalmap.commands.evaluate import evaluate
from globalmap.commands.rasterize import rasterize
from globalmap.commands.render import render
from globalmap.commands.sweep import sweep

__all__ = [
    "simulate",
    "build",
    "evaluate",
    "rasterize",
    "render",
    "sweep"
]
