import os


def get_num_workers(requested):
    """Worker threads for Monte Carlo loops.

    CMPS_TOMO_THREADS, when set to a positive integer, caps the requested
    number. Always returns at least one.
    """
    workers = max(int(requested), 1)
    cap = os.environ.get("CMPS_TOMO_THREADS")
    if cap:
        try:
            workers = min(workers, max(int(cap), 1))
        except ValueError:
            raise ValueError(
                "CMPS_TOMO_THREADS should be a positive integer, got {!r}".format(cap)
            )
    return workers
