""" Computational routines for the drivers
"""

from pruneroutines import numcore
from pruneroutines import selector
from pruneroutines import packaging
from pruneroutines import backbone
from pruneroutines import latency
from pruneroutines import costmodel
from pruneroutines import trainer


__all__ = [
    'numcore',
    'selector',
    'packaging',
    'backbone',
    'latency',
    'costmodel',
    'trainer'
]
