"""Entry points behind the `solve_kb.py` script.

Each command reads one KB file and writes to `out`; they return their exit
code so they can be called from tests as well as from `main()`.
"""
import json
import sys
import time
from dataclasses import asdict, dataclass
from typing import Optional

import pandas as pd

from oracle.oracle import enumerate_ltl_sat, truncated_feasibility

from .buchi import ltl_sat
from .config import SolverConfig
from .errors import DiamondCountError, ResourceLimitExceeded, TldError
from .ltl import to_text
from .matrix import engine_for, entry_formula
from .parser import parse_kb_file
from .reduction import instantiate_abox, kb_down, translate
from .utils import fraction_text, parse_entry

EXIT_SAT, EXIT_UNSAT, EXIT_ERROR = 0, 1, 2


@dataclass
class ResultRecord:
    path: str
    result: str
    s: Optional[int] = None
    q: Optional[int] = None
    bound: Optional[int] = None
    diamonds: Optional[int] = None
    p: Optional[str] = None
    certificate: str = ''
    elapsed: float = 0.0

    @property
    def exit_code(self):
        return {'SAT': EXIT_SAT, 'UNSAT': EXIT_UNSAT}.get(self.result, EXIT_ERROR)

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))

    def to_text(self):
        return '\n'.join(f'{key}: {value}' for key, value in self.to_dict().items() if value not in (None, ''))


def _error_text(err):
    return f'{type(err).__name__}: {err}'


def _certificate(verdict):
    if verdict.satisfiable and verdict.witness is not None:
        return f'{verdict.reason}; witness of side {verdict.witness.size}'
    if not verdict.satisfiable and verdict.evidence:
        pattern = ' '.join(f'{",".join(map(str, e))}={"sat" if ok else "x"}' for e, ok in verdict.evidence)
        return f'{verdict.reason}; entries {pattern}'
    return verdict.reason


def check_kb(path, config=None):
    """Decides one KB file and returns its record; solver errors become ERROR records."""
    start = time.perf_counter()
    try:
        kb = parse_kb_file(path)
        verdict = engine_for(kb, config or SolverConfig()).decide()
    except (TldError, OSError) as err:
        return ResultRecord(str(path), 'ERROR', certificate=_error_text(err),
                            elapsed=time.perf_counter() - start)
    period = verdict.period
    return ResultRecord(
        str(path), verdict.result,
        s=period.s if period else None,
        q=period.q if period else None,
        bound=verdict.bound,
        diamonds=verdict.diamonds,
        p=fraction_text(verdict.param) if verdict.param is not None else None,
        certificate=_certificate(verdict),
        elapsed=time.perf_counter() - start,
    )


def cmd_check(path, config=None, as_json=False, out=sys.stdout):
    record = check_kb(path, config)
    if record.result == 'ERROR':
        print(record.certificate, file=sys.stderr)
    print(record.to_json() if as_json else record.to_text(), file=out)
    return record.exit_code, record


def cmd_translate(path, down=False, entry='', out=sys.stdout):
    """Prints the grounded LTL of the KB, of its diamond-erased form, or of one matrix entry."""
    kb = parse_kb_file(path)
    if entry:
        ks = parse_entry(entry)
        if len(ks) != kb.d:
            raise DiamondCountError(f'the KB has {kb.d} diamond atom(s) but {len(ks)} entry indices were given')
        formula = translate(instantiate_abox(kb, *ks))
    elif down:
        formula = translate(kb_down(kb))
    else:
        formula = translate(kb)
    text = to_text(formula)
    print(text, file=out)
    return text


def format_grid(matrix, sat):
    """Rows on separate lines, exact fractions, `x` where an empty entry is unsatisfiable."""
    lines = []
    for r in range(matrix.size):
        cells = []
        for c in range(matrix.size):
            value = matrix[r, c]
            cells.append('x' if value == 0 and not sat(r, c) else fraction_text(value))
        lines.append(' '.join(cells))
    return '\n'.join(lines)


def cmd_matrix(path, size, config=None, out=sys.stdout):
    kb = parse_kb_file(path)
    engine = engine_for(kb, config or SolverConfig())
    witness = engine.build_witness(size)
    grid = format_grid(witness, engine.entry_sat)
    print(grid, file=out)
    if any(witness.row_tail) or any(witness.col_tail):
        print('row tails: ' + ' '.join(fraction_text(v) for v in witness.row_tail), file=out)
        print('col tails: ' + ' '.join(fraction_text(v) for v in witness.col_tail), file=out)
    return grid


def oracle_report(path, truncation, prefix_bound, loop_bound, config=None):
    """Runs the engine and both validators on one KB; one row per cross-check."""
    kb = parse_kb_file(path)
    config = config or SolverConfig()
    engine = engine_for(kb, config)
    verdict = engine.decide()
    rows = []

    key = (0,) * kb.d
    formula = entry_formula(engine.kb, key) if kb.d else translate(kb)
    subject = f'entry {",".join(map(str, key))}' if kb.d else 'translation'
    engine_sat = ltl_sat(formula, config.state_limit).satisfiable
    try:
        found = enumerate_ltl_sat(formula, prefix_bound, loop_bound)
        rows.append(dict(validator='enumeration', subject=subject,
                         engine='SAT' if engine_sat else 'UNSAT', oracle=found.outcome,
                         consistent=engine_sat or not found.satisfiable))
    except ResourceLimitExceeded as err:
        rows.append(dict(validator='enumeration', subject=subject,
                         engine='SAT' if engine_sat else 'UNSAT', oracle=f'skipped ({err})', consistent=True))

    if kb.d == 2:
        bound = truncation if not verdict.bound else min(truncation, verdict.bound)
        report = truncated_feasibility(kb, bound, config)
        if verdict.satisfiable:
            consistent = report.feasible
        else:
            consistent = not report.feasible or verdict.failing_level is not None
        rows.append(dict(validator='feasibility', subject=f'truncation {bound}',
                         engine=verdict.result, oracle=report.verdict, consistent=consistent))
    return pd.DataFrame(rows, columns=['validator', 'subject', 'engine', 'oracle', 'consistent'])


def cmd_oracle(path, truncation=8, prefix_bound=4, loop_bound=2, config=None, out=sys.stdout):
    table = oracle_report(path, truncation, prefix_bound, loop_bound, config)
    print(table.to_string(index=False), file=out)
    agree = bool(table['consistent'].all())
    print('agreement' if agree else 'DISAGREEMENT', file=out)
    return (EXIT_SAT if agree else EXIT_UNSAT), table


def log_to_wandb(args, record=None, table=None):
    """Pushes the run configuration and its outputs to Weights & Biases."""
    import wandb

    run = wandb.init(project=args.name, config=vars(args))
    try:
        if record is not None:
            run.log(record.to_dict())
        if table is not None:
            run.log({'oracle': wandb.Table(dataframe=table)})
    finally:
        run.finish()
