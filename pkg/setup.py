from setuptools import setup, Extension
from Cython.Build import cythonize

ext = Extension(
    "orchmach._kernel",
    ["src/orchmach/_kernel.pyx"],
)

setup(
    ext_modules=cythonize(ext, language_level=3),
)
