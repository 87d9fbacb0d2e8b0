#!/usr/bin/env python3

from prefigure.prefigure import get_all_args

import sys

from tld_lite.commands import EXIT_ERROR, cmd_check, cmd_matrix, cmd_oracle, cmd_translate, log_to_wandb
from tld_lite.config import SolverConfig
from tld_lite.errors import TldError


def run(args):
    config = SolverConfig.from_args(args)
    record = table = None

    if args.command == 'check':
        code, record = cmd_check(args.kb_path, config, as_json=args.json)
    elif args.command == 'translate':
        cmd_translate(args.kb_path, down=args.down, entry=args.entry)
        code = 0
    elif args.command == 'matrix':
        cmd_matrix(args.kb_path, args.size, config)
        code = 0
    elif args.command == 'oracle':
        code, table = cmd_oracle(args.kb_path, args.oracle_truncation, args.oracle_prefix,
                                 args.oracle_loop, config)
    else:
        raise ValueError(f"unknown command {args.command!r}, expected 'check', 'translate', 'matrix' or 'oracle'")

    if args.save_wandb == 'record':
        log_to_wandb(args, record, table)
    return code


def main():

    args = get_all_args()

    try:
        code = run(args)
    except (TldError, OSError) as err:
        print(f'{type(err).__name__}: {err}', file=sys.stderr)
        code = EXIT_ERROR

    sys.exit(code)


if __name__ == '__main__':
    main()
