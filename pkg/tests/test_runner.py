"""Tests for ordered task execution."""

import os
from unittest.mock import MagicMock, patch

from app.config import Settings
from app.core.arith import von_mangoldt
from app.services.runner import run_tasks


def test_serial_results_keep_task_order():
    """Test the in-process path."""
    assert run_tasks(von_mangoldt, [8, 1, 7, 12]) == [von_mangoldt(n) for n in [8, 1, 7, 12]]


def test_serial_run_calls_initializer_once():
    """Test that the initializer runs before the tasks in-process."""
    initializer = MagicMock()
    run_tasks(abs, [-1, -2], workers=1, initializer=initializer, initargs=("x",))
    initializer.assert_called_once_with("x")


def test_empty_task_list():
    """Test that nothing runs for no tasks."""
    initializer = MagicMock()
    assert run_tasks(abs, [], workers=4, initializer=initializer) == []
    initializer.assert_not_called()


def test_process_pool_matches_serial_run():
    """Test that two spawn workers give the serial results in task order."""
    tasks = list(range(1, 200))
    assert run_tasks(von_mangoldt, tasks, workers=2) == run_tasks(von_mangoldt, tasks)


def test_pool_workers_get_the_configured_blas_threads():
    """Test that spawned workers see BLAS_THREADS_PER_WORKER in their environment."""
    settings = Settings(BLAS_THREADS_PER_WORKER=3)
    with patch("app.services.runner.get_settings", return_value=settings), patch.dict(os.environ):
        threads = run_tasks(os.getenv, ["OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS"], workers=2)
    assert threads == ["3", "3"]
