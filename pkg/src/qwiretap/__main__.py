import os
import sys

# BLAS thread count must be fixed before numpy loads.
_threads = os.environ.get("QWIRETAP_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)

from qwiretap.cli import main  # noqa: E402

sys.exit(main())
