import asyncio
from concurrent.futures import ThreadPoolExecutor
from typing import AsyncGenerator, Iterator

import numpy as np
from tqdm import tqdm

from powervar.core.generators import generate
from powervar.core.hypothesis import run_test
from powervar.core.models import (
    CellResult,
    MonteCarloReport,
    ProcessKind,
    ProcessSpec,
    Sidedness,
    TestConfig,
    TestResult,
)
from powervar.core.runtime.helpers import CellSpec, TableConfig, default_sided, trial_seeds
from powervar.core.runtime.stats import EngineStats
from powervar.settings import HYPOTHESIS_SETTINGS, MONTECARLO_SETTINGS
from powervar.util.logging import get_logger

log = get_logger(__name__, stage="montecarlo")


class MonteCarloEngine:
    """Rejection-rate experiments over synthetic processes.

    Each trial generates one signal and tests it. Trials run on a thread pool
    and are gathered in trial order, so a cell's p-values depend only on the
    master seed, never on ``concurrency``.

    Args:
        concurrency: Trials in flight at once (thread pool size).
        alpha: Significance level deciding each trial.
        fast_path: Whether one-sided trials may skip the bootstrap. Off by
            default so p-value histograms are those of the bootstrap.
    """
    def __init__(
            self,
            concurrency: int | None = None,
            alpha: float | None = None,
            fast_path: bool | None = None,
        ):
        cfg = MONTECARLO_SETTINGS
        self.concurrency = concurrency if concurrency is not None else cfg.concurrency
        self.alpha = alpha if alpha is not None else HYPOTHESIS_SETTINGS.alpha
        self.fast_path = fast_path if fast_path is not None else cfg.fast_path
        self.stats = EngineStats()

    def _trial(self, cell: CellSpec, master_seed: int, trial: int) -> TestResult:
        gen_seed, test_seed = trial_seeds(master_seed, trial)
        signal = generate(ProcessSpec(kind=cell.kind, n=cell.n, seed=gen_seed))
        config = TestConfig(
            replicates=cell.replicates,
            alpha=self.alpha,
            sided=cell.sided,
            seed=test_seed,
            fast_path=self.fast_path,
        )
        # trials are the parallel unit; one thread per test
        return run_test(signal, config, workers=1)

    async def run_cell(
            self,
            cell: CellSpec,
            master_seed: int,
            pool: ThreadPoolExecutor | None = None,
            pbar: tqdm | None = None,
        ) -> CellResult:
        """Run every trial of ``cell`` and aggregate the rejection rate.

        Args:
            cell: The (process, N, trials, B, sidedness) to run.
            master_seed: Seed from which every trial's seeds are derived.
            pool: Executor to run trials on; a private one is created if omitted.
            pbar: Optional progress bar advanced once per trial.

        Returns:
            The cell result with the raw p-values in trial order.
        """
        loop = asyncio.get_running_loop()
        sem = asyncio.Semaphore(self.concurrency)
        own_pool = pool is None
        if own_pool:
            pool = ThreadPoolExecutor(max_workers=self.concurrency)
        self.stats.cells_started += 1
        kind = cell.kind.value

        async def one(trial: int) -> float:
            async with sem:
                started = self.stats.on_trial_start()
                try:
                    result = await loop.run_in_executor(
                        pool, self._trial, cell, master_seed, trial
                    )
                except Exception:
                    self.stats.on_trial_error(kind)
                    raise
                self.stats.on_trial_end(kind, started, result)
                if pbar is not None:
                    pbar.update(1)
                return result.p_value

        try:
            p_values = np.asarray(await asyncio.gather(*(one(t) for t in range(cell.trials))))
        finally:
            if own_pool:
                pool.shutdown(wait=True)

        self.stats.cells_completed += 1
        result = CellResult(
            kind=cell.kind,
            n=cell.n,
            trials=cell.trials,
            replicates=cell.replicates,
            sided=cell.sided,
            rejection_rate=float(np.mean(p_values < self.alpha)),
            mean_p=float(np.mean(p_values)),
            p_values=p_values,
            alpha=self.alpha,
        )
        log.bind(kind=kind, n=cell.n).info(
            "cell complete",
            extra={
                "trials": cell.trials,
                "rate": result.rejection_rate,
                "se": result.standard_error,
            },
        )
        return result

    async def run(
            self,
            table: TableConfig,
            progress: bool = False,
        ) -> AsyncGenerator[CellResult, None]:
        """Run every cell of ``table`` and yield results cell by cell.

        Cells are produced process-major in the table's order; trials within a
        cell run concurrently.
        """
        cells = list(table.cells())
        pbar = tqdm(total=sum(c.trials for c in cells), unit="trial") if progress else None

        with ThreadPoolExecutor(max_workers=self.concurrency) as pool:
            for cell in cells:
                if pbar is not None:
                    pbar.set_postfix(kind=cell.kind.value, n=cell.n)
                yield await self.run_cell(cell, table.master_seed, pool=pool, pbar=pbar)

        if pbar is not None:
            pbar.close()


def montecarlo_async(
    table: TableConfig,
    progress: bool = False,
    engine: MonteCarloEngine | None = None,
) -> AsyncGenerator[CellResult, None]:
    if engine is None:
        engine = MonteCarloEngine()
    return engine.run(table, progress=progress)


##### ASYNC IN SYNC #####
def montecarlo_blocking_iter(
    table: TableConfig,
    progress: bool = False,
    engine: MonteCarloEngine | None = None,
) -> Iterator[CellResult]:
    """Run a Monte Carlo table, yielding each cell as it completes.

    Warning:
        Spins up its own event loop therefore this function must **not** be
        invoked from within an active asyncio event loop.
    """
    loop = asyncio.new_event_loop()
    asyncio.set_event_loop(loop)
    agen = montecarlo_async(table, progress=progress, engine=engine)

    try:
        while True:
            try:
                yield loop.run_until_complete(agen.__anext__())
            except StopAsyncIteration:
                break
    finally:
        loop.run_until_complete(loop.shutdown_asyncgens())
        loop.close()


def montecarlo_blocking(
    table: TableConfig,
    progress: bool = False,
    engine: MonteCarloEngine | None = None,
) -> MonteCarloReport:
    cells = list(montecarlo_blocking_iter(table, progress=progress, engine=engine))
    return MonteCarloReport(cells=cells, master_seed=table.master_seed)


def run_table(
    table: TableConfig | None = None,
    progress: bool = False,
    engine: MonteCarloEngine | None = None,
) -> MonteCarloReport:
    """Run a full grid (by default every process over N in {10, ..., 1000})."""
    return montecarlo_blocking(table or TableConfig(), progress=progress, engine=engine)


def run_cell(
    kind: ProcessKind | str,
    n: int,
    trials: int,
    replicates: int,
    sided: Sidedness | str | None = None,
    master_seed: int = 0,
    engine: MonteCarloEngine | None = None,
) -> CellResult:
    """Run a single (process, N) cell; ``sided`` defaults per process kind."""
    cell = CellSpec(
        kind=kind,
        n=n,
        trials=trials,
        replicates=replicates,
        sided=sided if sided is not None else default_sided(kind),
    )
    engine = engine or MonteCarloEngine()
    return asyncio.run(engine.run_cell(cell, master_seed))
