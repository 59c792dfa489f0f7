from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("ctrent._ckernels", ["src/ctrent/_ckernels.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

for ext in extensions:
    # Fall back to the pure NumPy backend when no compiler is available.
    ext.optional = True

setup(ext_modules=extensions)
