from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("pairmoments._ckernels", ["src/pairmoments/_ckernels.pyx"])],
        language_level=3,
    )
except ImportError:
    # The package runs on the pure backend when the extension is unavailable.
    ext_modules = []

setup(ext_modules=ext_modules)
