from dataclasses import dataclass
from typing import Optional

from .buchi import DEFAULT_STATE_LIMIT


@dataclass(frozen=True)
class SolverConfig:
    state_limit: int = DEFAULT_STATE_LIMIT
    bound: Optional[int] = None
    jobs: int = 1
    cache_dir: Optional[str] = None
    trace: bool = False
    progress: bool = False

    @classmethod
    def from_args(cls, args):
        """Reads the solver settings off a prefigure namespace; 0 and '' mean unset."""
        get = lambda name, default: getattr(args, name, default)
        return cls(
            state_limit=int(get('state_limit', 0)) or DEFAULT_STATE_LIMIT,
            bound=int(get('bound', 0)) or None,
            jobs=max(1, int(get('jobs', 1))),
            cache_dir=get('cache_dir', '') or None,
            trace=bool(get('trace', False)),
            progress=bool(get('progress', False)),
        )
