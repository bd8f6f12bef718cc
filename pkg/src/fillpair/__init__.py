"""Filling pairs of simple closed curves on surfaces.

Modules:
  pair     crossing-data encoding, face tracing, canonical forms, bigon reduction
  cutdual  cut surface, parallel arc classes, dual graphs, girth, curve extraction
  curves   normal curves drawn in the faces of a configuration
  path     curve-graph paths with checkable certificates, distance brackets
  oracle   exhaustive enumeration at small crossing number
  tracks   train tracks, vertex cycles, realized pairs
  bounds   the parameterized intersection and distance bounds
  formats  ``fillpair-format 1`` files
"""

__version__ = "0.1.0"
