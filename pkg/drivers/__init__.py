"""
 Libraries for the drivers
"""

from drivers import analyzedriver
from drivers import latdriver
from drivers import plandriver
from drivers import traindriver
from drivers import rundriver


__all__ = [
    'analyzedriver',
    'latdriver',
    'plandriver',
    'traindriver',
    'rundriver'
]
