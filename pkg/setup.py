"""Build script: compiles the optional scanning-kernel extension.

The package works without the extension (a pure-Python fallback is selected at
import time), so a failed or skipped compile only costs throughput. Set
CLOZEAUDIT_NO_EXT=1 to skip compilation explicitly.
"""

import os
import sys

from setuptools import setup

extensions = []
if os.environ.get("CLOZEAUDIT_NO_EXT", "") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        extensions = cythonize(
            [
                Extension(
                    "clozeaudit._ckernels",
                    ["src/clozeaudit/_ckernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": 3},
        )
    except ImportError as exc:
        print(f"Cython unavailable ({exc}); building without the compiled kernels",
              file=sys.stderr)

setup(ext_modules=extensions)
