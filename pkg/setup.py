''' Install prunedriver
'''
from setuptools import setup


setup(name='prunedriver',
      version='0.1.0',
      packages=['drivers',
                'pruneroutines',
                'pruneroutines.numcore',
                'pruneroutines.backbone',
                'pruneroutines.trainer',
                'prunelib',
                'prunelib.prune_io',
                'prunelib.prune_io.parser',
                'prunelib.prune_io.printer',
                'prunelib.prune_io.reader',
                'prunelib.prune_io.writer'],
      package_data={'prunelib': ['presets/*.yaml', 'presets/*.csv']},
      scripts=['bin/autoprune.py'])
