import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("HYPERLANE_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [Extension("hyperlane._kernel", ["src/hyperlane/_kernel.pyx"],
                       include_dirs=[np.get_include()])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
