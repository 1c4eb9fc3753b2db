"""Build script.

The compiled evaluation core (casimir._fasteval) is optional: if Cython or a
C compiler is unavailable the package installs anyway and falls back to the
pure-Python evaluator at import time.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "casimir._fasteval",
                sources=["src/casimir/_fasteval.pyx"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"casimir: building without compiled evaluator ({exc})")

setup(ext_modules=ext_modules)
