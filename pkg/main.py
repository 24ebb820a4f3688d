#!/usr/bin/env python3
import logging
import sys
from typing import Optional, Sequence

import cli
from exceptions import ConfigError


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = cli.build_parser()
    try:
        args = parser.parse_args(argv)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        return cli.fail(exc, cli.EXIT_CONFIG)

    # Warnings only by default, -v for progress, -vv for per-cycle detail
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(
        level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr
    )
    return cli.run(cli.manifest_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
