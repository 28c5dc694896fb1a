"""qtp command line: run, validate and list scenarios"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .. import __version__
from ..core.config import ConfigManager, ScenarioConfig, apply_overrides
from ..core.errors import ConfigurationError, QtpError
from ..core.presets import PRESETS, built_in_presets, describe, preset
from ..fiber.cache import ModeCache
from . import planner, runner

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    """Bad command-line input (exit status 2)"""


def load_scenario(source: str) -> ScenarioConfig:
    """A preset name or the path of a config file"""
    if source in PRESETS:
        return preset(source)
    path = Path(source)
    if not path.exists():
        raise UsageError(f"{source} is neither a preset ({', '.join(PRESETS)}) nor a config file")
    return ConfigManager.load(path)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qtp", description="Classical and photon-pair speckle simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run a config file or a preset")
    run.add_argument("scenario", help="config file or preset name")
    run.add_argument("--seed", type=int, help="override run.seed")
    run.add_argument("--out", help="override run.output_dir")
    run.add_argument("--mode-cache", help="directory of cached mode bases")
    run.add_argument("--threads", type=int, help="worker threads")

    validate = commands.add_parser("validate", help="check a config and print its execution plan")
    validate.add_argument("scenario", help="config file or preset name")
    validate.add_argument("--mode-cache", help="directory of cached mode bases")

    presets = commands.add_parser("presets", help="list built-in presets")
    presets.add_argument("--write", metavar="DIR", help="also save every preset as DIR/<name>.ini")
    return parser


def _cmd_presets(args) -> int:
    configs = built_in_presets()
    width = max(len(name) for name in configs)
    for name, config in configs.items():
        print(f"{name:<{width}}  {describe(config)}")
    if args.write:
        directory = Path(args.write)
        directory.mkdir(parents=True, exist_ok=True)
        for name, config in configs.items():
            ConfigManager.save(config, directory / f"{name}.ini")
        print(f"Saved {len(configs)} presets to {directory}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    config = apply_overrides(load_scenario(args.scenario), mode_cache=args.mode_cache)
    plan = planner.validate_and_plan(config, ModeCache(config.run.mode_cache or None))
    for line in plan.summary_lines():
        print(line)
    print("Config OK")
    return EXIT_OK


def _cmd_run(args) -> int:
    config = apply_overrides(load_scenario(args.scenario), seed=args.seed, output_dir=args.out,
                             mode_cache=args.mode_cache, threads=args.threads)
    manifest = runner.run(config)
    print(f"Wrote {len(manifest.outputs)} files to {config.run.output_dir}")
    for record in manifest.outputs:
        print(f"  {record.path}")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    commands = {"run": _cmd_run, "validate": _cmd_validate, "presets": _cmd_presets}
    try:
        return commands[args.command](args)
    except UsageError as e:
        print(f"qtp: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigurationError as e:
        print(f"Invalid configuration: {e}", file=sys.stderr)
        return EXIT_FAILED
    except QtpError as e:
        print(f"Run failed: {e}", file=sys.stderr)
        return EXIT_FAILED
