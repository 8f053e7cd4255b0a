"""Seed executor: runs independent seeded jobs on a worker pool.

Every seed owns its random streams and eval counter, so jobs share nothing
mutable. Results come back in seed order regardless of completion order.
"""

import os
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, TypeVar

from loguru import logger
from opentelemetry import context as otel_context
from opentelemetry.trace import Status, StatusCode

from sreda.telemetry import traced_span

T = TypeVar("T")


class SeedExecutor:
    """Thread-pool runner for one job per seed."""

    def __init__(self, max_workers: Optional[int] = None):
        """Initialize the executor.

        Args:
            max_workers: Worker ceiling; defaults to the CPU count
        """
        self.max_workers = max_workers or os.cpu_count() or 1

    def map(
        self,
        label: str,
        seeds: List[int],
        job: Callable[[int], T],
        attributes: Optional[Dict[str, Any]] = None,
    ) -> List[T]:
        """Run ``job(seed)`` for every seed inside a ``seed.<label>`` span.

        Raises:
            Exception: The first failing seed's exception, after all jobs end
        """
        if not seeds:
            return []
        workers = min(len(seeds), self.max_workers)
        parent = otel_context.get_current()
        logger.info(f"Running {label} on {len(seeds)} seed(s) with {workers} worker(s)")
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="seed") as pool:
            futures = [
                pool.submit(self._run_one, label, seed, job, attributes or {}, parent)
                for seed in seeds
            ]
            return [future.result() for future in futures]

    def _run_one(self, label, seed, job, attributes, parent):
        token = otel_context.attach(parent)
        try:
            with traced_span(f"seed.{label}", **attributes, seed=seed, algorithm=label) as span:
                start_time = time.time()
                try:
                    result = job(seed)
                except Exception as e:
                    logger.error(f"{label} seed {seed} failed: {e}")
                    if span:
                        span.set_status(Status(StatusCode.ERROR, str(e)))
                        span.record_exception(e)
                    raise
                duration = time.time() - start_time
                if span:
                    span.set_attribute("seed.duration_ms", duration * 1000)
                    total = getattr(result, "total_evals", None)
                    if total is not None:
                        span.set_attribute("seed.evals_physical", total)
                    span.set_status(Status(StatusCode.OK))
                logger.debug(f"{label} seed {seed} finished in {duration:.2f}s")
                return result
        finally:
            otel_context.detach(token)
