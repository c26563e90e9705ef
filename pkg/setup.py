from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; _kernels falls back at import time
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("spanalt._ckernels", ["src/spanalt/_ckernels.pyx"],
                   extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
