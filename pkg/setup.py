from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "udoc.decoders._kernels",
        ["src/udoc/decoders/_kernels.pyx"],
        extra_compile_args=["-O3"],
    )
]

setup(
    ext_modules=cythonize(extensions, language_level=3),
    zip_safe=False,
)
