"""Ordered execution of independent work units, serially or on a spawn process pool."""

import logging
import multiprocessing
import os
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from typing import Any, TypeVar

from app.config import get_settings

logger = logging.getLogger(__name__)

TaskT = TypeVar("TaskT")
ResultT = TypeVar("ResultT")

BLAS_THREAD_VARIABLES = ("OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "OMP_NUM_THREADS")


def run_tasks(
    fn: Callable[[TaskT], ResultT],
    tasks: Sequence[TaskT],
    workers: int = 1,
    initializer: Callable[..., None] | None = None,
    initargs: tuple[Any, ...] = (),
) -> list[ResultT]:
    """Apply ``fn`` to every task and return the results in task order.

    ``workers == 1`` runs in-process (after calling ``initializer`` once); otherwise a
    ``spawn`` pool of ``min(workers, len(tasks))`` processes runs each initializer
    once per worker, with BLAS pinned to ``BLAS_THREADS_PER_WORKER`` threads.
    ``fn``, the tasks and the initializer must be picklable.
    """
    if not tasks:
        return []
    if workers <= 1 or len(tasks) == 1:
        if initializer is not None:
            initializer(*initargs)
        return [fn(task) for task in tasks]

    size = min(workers, len(tasks))
    # Spawned workers inherit the environment before they import numpy
    threads = str(get_settings().BLAS_THREADS_PER_WORKER)
    os.environ.update(dict.fromkeys(BLAS_THREAD_VARIABLES, threads))
    logger.info("Running %d tasks on %d worker processes", len(tasks), size)
    with ProcessPoolExecutor(
        max_workers=size,
        mp_context=multiprocessing.get_context("spawn"),
        initializer=initializer,
        initargs=initargs,
    ) as executor:
        return list(executor.map(fn, tasks))
