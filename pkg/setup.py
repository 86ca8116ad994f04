"""Build hook for the optional compiled kernel.

The package is fully functional without the extension (a pure-Python
kernel with the same interface is selected at import time), so a missing
Cython toolchain only costs speed, never correctness.
"""

import os

from setuptools import Extension, setup


def _extensions():
    if os.environ.get("RELINOPT_SKIP_EXT") == "1":
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        [Extension("relinopt._kernel_c", ["src/relinopt/_kernel_c.pyx"])],
        compiler_directives={"language_level": "3"},
    )


setup(ext_modules=_extensions(), zip_safe=False)
