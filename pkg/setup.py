"""Build hook for the optional compiled ordering kernel.

The package works without the extension; cellgrid.place._kernels falls
back to the pure-Python implementation when the import fails.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/cellgrid/place/_kernels/_order_cy.pyx"],
        language_level="3",
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
