"""Build the optional compiled slot kernel.

The kernel source (src/cv2x_aoi/engine/_kernel.py) is written in Cython
pure-Python mode: compiled it becomes the fast extension, uncompiled it
still runs as a plain module. If Cython or a C compiler is missing, the
install succeeds without the extension and the interpreted kernel is used.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext = Extension(
        "cv2x_aoi.engine._kernel",
        ["src/cv2x_aoi/engine/_kernel.py"],
        include_dirs=[numpy.get_include()],
    )
    ext_modules = cythonize(
        [ext],
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
