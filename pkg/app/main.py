"""
PAVANE command-line front end.

Every command builds a payload (a dict with big integers as decimal strings)
and a DataFrame; --format picks JSON of the payload or CSV/text of the frame.
Exit codes: 0 success, 1 a verification failed, 2 invalid input or cache
trouble, 3 resource ceiling, 70 internal invariant broken.
"""
import argparse
import json
import logging
import os
import sys
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import pandas as pd

# Allow `python app/main.py ...` as well as `python -m app.main ...`
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app import analysis
from app.config import OUTPUT_FORMATS, CliConfig, setup_logging
from app.count_cache import CountCache
from app.enumerator import check_ceiling, count_sequence, enumerate_avoiders
from app.validation import InputValidator
from models.bijections import g_inverse, g_map, h_inverse, h_map
from models.containment import avoids, contains
from models.errors import (
    CacheIOError,
    InternalInvariantError,
    PavaneError,
    ResourceCeilingError,
)
from models.guesser import (
    DEFAULT_MARGIN,
    guess_annihilator,
    read_terms_file,
    search_annihilators,
)
from models.patterns import PatternSet, build_pattern_set, parse_descriptor
from models.permutation import format_permutation, parse_permutation, parse_values
from models.series import gf_A44

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2
EXIT_CEILING = 3
EXIT_INTERNAL = 70

Result = Tuple[dict, pd.DataFrame, bool]

BIJECTIONS: Dict[str, Callable] = {'g': g_map, 'g-inv': g_inverse, 'h': h_map, 'h-inv': h_inverse}


class _ArgumentParser(argparse.ArgumentParser):
    """Raises instead of exiting so run_cli can map usage errors to exit code 2"""

    def error(self, message):
        raise _UsageError(message, self.format_usage())


class _UsageError(Exception):
    def __init__(self, message: str, usage: str):
        super().__init__(message)
        self.usage = usage


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--format', choices=OUTPUT_FORMATS, default=argparse.SUPPRESS,
                        help='output format (default: json)')
    common.add_argument('--cache', default=argparse.SUPPRESS,
                        help='count cache directory (default: $PAVANE_CACHE)')
    common.add_argument('--jobs', type=int, default=argparse.SUPPRESS,
                        help='parallel workers, joblib n_jobs (default: 1)')
    common.add_argument('--force-max-n', action='store_true', default=argparse.SUPPRESS,
                        help='allow n above the enumeration ceiling')
    common.add_argument('--ceiling', type=int, default=argparse.SUPPRESS,
                        help='replace the default enumeration ceilings')
    common.add_argument('-v', '--verbose', action='count', default=argparse.SUPPRESS,
                        help='log progress to stderr (-vv for debug)')
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = _ArgumentParser(prog='pavane', parents=[common],
                             description='Permutation pattern avoidance: enumeration, bijections and series')
    commands = parser.add_subparsers(dest='command', metavar='<command>', parser_class=_ArgumentParser)
    commands.required = True

    p = commands.add_parser('count', parents=[common], help='count avoiders for n = 0..N')
    p.add_argument('--class', dest='pattern_class', required=True)
    p.add_argument('--max-n', type=int, required=True)

    p = commands.add_parser('list', parents=[common], help='list the avoiders of length n')
    p.add_argument('--class', dest='pattern_class', required=True)
    p.add_argument('--n', type=int, required=True)

    p = commands.add_parser('check', parents=[common], help='does a permutation avoid a class?')
    p.add_argument('--perm', required=True)
    p.add_argument('--class', dest='pattern_class', required=True)

    p = commands.add_parser('biject', parents=[common], help='apply g, h or an inverse')
    p.add_argument('--map', dest='map_name', choices=sorted(BIJECTIONS), required=True)
    p.add_argument('--param', type=int, required=True)
    p.add_argument('--perm', required=True)

    verify = commands.add_parser('verify', parents=[common], help='exhaustive verifications')
    checks = verify.add_subparsers(dest='check', metavar='<check>', parser_class=_ArgumentParser)
    checks.required = True
    p = checks.add_parser('wilf', parents=[common])
    p.add_argument('--left', required=True)
    p.add_argument('--right', required=True)
    p.add_argument('--max-n', type=int, required=True)
    p = checks.add_parser('sandwich', parents=[common])
    p.add_argument('--k', type=int, required=True)
    p.add_argument('--max-n', type=int, required=True)
    p = checks.add_parser('bijection', parents=[common])
    p.add_argument('--map', dest='map_name', choices=analysis.BIJECTION_MAPS, required=True)
    p.add_argument('--param', type=int, required=True)
    p.add_argument('--max-n', type=int, required=True)
    p = checks.add_parser('direct-sum', parents=[common])
    p.add_argument('--m', type=int, required=True)
    p.add_argument('--q', required=True)
    p.add_argument('--max-n', type=int, required=True)

    series = commands.add_parser('series', parents=[common], help='exact series coefficients')
    kinds = series.add_subparsers(dest='series_kind', metavar='<series>', parser_class=_ArgumentParser)
    kinds.required = True
    p = kinds.add_parser('a44', parents=[common])
    p.add_argument('--order', type=int, required=True)

    p = commands.add_parser('guess', parents=[common], help='guess an algebraic relation for a sequence')
    p.add_argument('--terms', required=True, help='file with one integer per line')
    p.add_argument('--deg-f', type=int, required=True)
    p.add_argument('--deg-z', type=int, required=True)
    p.add_argument('--margin', type=int, default=DEFAULT_MARGIN)
    p.add_argument('--sweep', action='store_true', help='try every feasible (d, D) up to the bounds')

    report = commands.add_parser('report', parents=[common], help='diagnostic reports')
    reports = report.add_subparsers(dest='report', metavar='<report>', parser_class=_ArgumentParser)
    reports.required = True
    p = reports.add_parser('growth', parents=[common])
    p.add_argument('--k', type=int, required=True)
    p.add_argument('--max-n', type=int, required=True)
    p = reports.add_parser('rlmax', parents=[common])
    p.add_argument('--left', required=True)
    p.add_argument('--right', required=True)
    p.add_argument('--n', type=int, required=True)
    p = reports.add_parser('regev', parents=[common])
    p.add_argument('--k', type=int, required=True)
    p.add_argument('--max-n', type=int, required=True)
    return parser


def _pattern_set(text: str) -> PatternSet:
    return parse_descriptor(InputValidator.sanitize_text_input(text))


def _permutation(text: str):
    return parse_permutation(InputValidator.sanitize_text_input(text))


def _cache(config: CliConfig) -> Optional[CountCache]:
    return CountCache(config.cache_dir) if config.cache_dir else None


def _ceiling(n: int, pattern_set: PatternSet, config: CliConfig):
    """CLI ceilings; once they pass, the library calls below run with force=True"""
    check_ceiling(n, pattern_set, limit=config.max_n, force=config.force_max_n, cli=True)


def _stringify(value):
    if isinstance(value, bool) or not isinstance(value, int):
        return value
    return str(value)


def _cmd_count(args, config: CliConfig) -> Result:
    pattern_set = _pattern_set(args.pattern_class)
    sequence = count_sequence(pattern_set, args.max_n, cache=_cache(config), jobs=config.jobs,
                              limit=config.max_n, force=config.force_max_n, cli=True)
    frame = pd.DataFrame({'n': range(len(sequence)), 'count': list(sequence.terms)})
    return sequence.to_dict(), frame, True


def _cmd_list(args, config: CliConfig) -> Result:
    pattern_set = _pattern_set(args.pattern_class)
    _ceiling(args.n, pattern_set, config)
    avoiders = [format_permutation(p) for p in enumerate_avoiders(args.n, pattern_set)]
    payload = {'class': pattern_set.descriptor, 'n': args.n, 'count': str(len(avoiders)),
               'permutations': avoiders}
    return payload, pd.DataFrame({'permutation': avoiders}), True


def _cmd_check(args, config: CliConfig) -> Result:
    p = _permutation(args.perm)
    pattern_set = _pattern_set(args.pattern_class)
    avoiding = avoids(p, pattern_set)
    witness = None
    if not avoiding:
        witness = next(format_permutation(q) for q in pattern_set.sorted_patterns() if contains(p, q))
    payload = {'perm': format_permutation(p), 'class': pattern_set.descriptor,
               'verdict': 'avoids' if avoiding else 'contains', 'witness': witness}
    return payload, pd.DataFrame([payload]), True


def _cmd_biject(args, config: CliConfig) -> Result:
    # g works on any distinct values (e.g. a prefix), h on permutations
    text = InputValidator.sanitize_text_input(args.perm)
    p = parse_values(text) if args.map_name in ('g', 'g-inv') else parse_permutation(text)
    image = BIJECTIONS[args.map_name](p, args.param)
    payload = {'map': args.map_name, 'param': str(args.param),
               'perm': format_permutation(p), 'image': format_permutation(image)}
    return payload, pd.DataFrame([payload]), True


def _cmd_verify(args, config: CliConfig) -> Result:
    cache = _cache(config)
    if args.check == 'wilf':
        left, right = _pattern_set(args.left), _pattern_set(args.right)
        for pattern_set in (left, right):
            _ceiling(args.max_n, pattern_set, config)
        report = analysis.wilf_check(left, right, args.max_n, cache, config.jobs, force=True)
        return report.to_dict(), report.to_frame(), report.equal
    if args.check == 'sandwich':
        _ceiling(args.max_n, build_pattern_set('A', max(args.k, 3)), config)
        _ceiling(args.max_n, parse_descriptor(f"mono:{max(args.k - 1, 1)}"), config)
        report = analysis.sandwich_check(args.k, args.max_n, cache, config.jobs, force=True)
        return report.to_dict(), report.to_frame(), report.passed
    if args.check == 'bijection':
        source, target, _, _ = analysis.bijection_classes(args.map_name, args.param)
        for pattern_set in (source, target):
            _ceiling(args.max_n, pattern_set, config)
        report = analysis.bijection_check(args.map_name, args.param, args.max_n, config.jobs)
        return report.to_dict(), report.to_frame(), report.passed
    q = _permutation(args.q)
    for pattern_set in analysis.direct_sum_patterns(args.m, q):
        _ceiling(args.max_n, pattern_set, config)
    report = analysis.direct_sum_wilf_check(args.m, q, args.max_n, cache, config.jobs, force=True)
    return report.to_dict(), report.to_frame(), report.equal


def _cmd_series(args, config: CliConfig) -> Result:
    coefficients = gf_A44(args.order).as_integers()
    payload = {'series': 'a44', 'order': args.order, 'coefficients': [str(c) for c in coefficients]}
    frame = pd.DataFrame({'n': range(len(coefficients)), 'coefficient': coefficients})
    return payload, frame, True


def _cmd_guess(args, config: CliConfig) -> Result:
    terms = read_terms_file(args.terms)
    if args.sweep:
        outcome = search_annihilators(terms, args.deg_f, args.deg_z, args.margin)
    else:
        outcome = guess_annihilator(terms, args.deg_f, args.deg_z, args.margin)
    payload = outcome.to_dict()
    frame = pd.DataFrame([{'found': payload['found'], 'expression': payload['expression'],
                           'message': payload['message']}])
    return payload, frame, True


def _cmd_report(args, config: CliConfig) -> Result:
    cache = _cache(config)
    if args.report == 'rlmax':
        left, right = _pattern_set(args.left), _pattern_set(args.right)
        for pattern_set in (left, right):
            _ceiling(args.n, pattern_set, config)
        report = analysis.rlmax_profile_compare(left, right, args.n)
        return report.to_dict(), report.to_frame(), True
    if args.report == 'growth':
        _ceiling(args.max_n, build_pattern_set('A', max(args.k, 3)), config)
        report = analysis.growth_report(args.k, args.max_n, cache, config.jobs, force=True)
    else:
        _ceiling(args.max_n, parse_descriptor(f"mono:{max(args.k, 1)}"), config)
        report = analysis.regev_report(args.k, args.max_n, cache, config.jobs, force=True)
    return report.to_dict(), report.to_frame(), True


COMMANDS = {
    'count': _cmd_count,
    'list': _cmd_list,
    'check': _cmd_check,
    'biject': _cmd_biject,
    'verify': _cmd_verify,
    'series': _cmd_series,
    'guess': _cmd_guess,
    'report': _cmd_report,
}


_NULL = type(None)
_REPORT_ROWS = {'rows': (list,)}
_WILF = {'left': (str,), 'right': (str,), 'equal': (bool,), **_REPORT_ROWS}
_GROWTH = {'k': (str,), 'target': (str,), 'exponent': (str,), 'exponent_is_integer': (bool,),
           'c_low': (str, _NULL), 'c_high': (str, _NULL), **_REPORT_ROWS}

# JSON payload of every command: key -> allowed types. Integers are always
# decimal strings, so the only JSON scalars are strings, booleans and null.
OUTPUT_SCHEMAS: Dict[str, Dict[str, tuple]] = {
    'count': {'class': (str,), 'terms': (list,)},
    'list': {'class': (str,), 'n': (str,), 'count': (str,), 'permutations': (list,)},
    'check': {'perm': (str,), 'class': (str,), 'verdict': (str,), 'witness': (str, _NULL)},
    'biject': {'map': (str,), 'param': (str,), 'perm': (str,), 'image': (str,)},
    'verify wilf': _WILF,
    'verify direct-sum': _WILF,
    'verify sandwich': {'k': (str,), 'passed': (bool,), **_REPORT_ROWS},
    'verify bijection': {'map': (str,), 'param': (str,), 'passed': (bool,), **_REPORT_ROWS},
    'series a44': {'series': (str,), 'order': (str,), 'coefficients': (list,)},
    'guess': {'found': (bool,), 'n_terms': (str,), 'max_d': (str,), 'max_D': (str,),
              'tried': (list,), 'candidate': (dict, _NULL), 'expression': (str, _NULL),
              'message': (str,)},
    'report growth': _GROWTH,
    'report regev': _GROWTH,
    'report rlmax': {'left': (str,), 'right': (str,), 'n': (str,), 'equal': (bool,),
                     'configurations': (str,), **_REPORT_ROWS},
}


def command_label(args) -> str:
    """'verify wilf', 'report growth', ... or the bare command name"""
    sub = {'verify': 'check', 'series': 'series_kind', 'report': 'report'}.get(args.command)
    return f"{args.command} {getattr(args, sub)}" if sub else args.command


def json_ready(value):
    """Integers become decimal strings at any depth; tuples become lists"""
    if isinstance(value, dict):
        return {key: json_ready(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_ready(item) for item in value]
    return _stringify(value)


def _scalars_ok(value) -> bool:
    if isinstance(value, dict):
        return all(_scalars_ok(item) for item in value.values())
    if isinstance(value, list):
        return all(_scalars_ok(item) for item in value)
    return isinstance(value, (str, bool, _NULL))


def schema_errors(label: str, payload: dict) -> List[str]:
    """Differences between a JSON-ready payload and its documented schema"""
    schema = OUTPUT_SCHEMAS[label]
    errors = []
    if set(payload) != set(schema):
        errors.append(f"keys {sorted(payload)} != {sorted(schema)}")
    for key, allowed in schema.items():
        if key in payload and not isinstance(payload[key], allowed):
            errors.append(f"'{key}' is {type(payload[key]).__name__}")
    if not _scalars_ok(payload):
        errors.append("payload holds a value that is not a string, boolean or null")
    return errors


def render(payload: dict, frame: pd.DataFrame, output_format: str) -> str:
    if output_format == 'json':
        return json.dumps(json_ready(payload), indent=2)
    if not frame.empty:
        frame = frame.apply(lambda column: column.map(_stringify))
    if output_format == 'csv':
        return frame.to_csv(index=False).rstrip('\n')
    return frame.to_string(index=False)


def run_cli(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None,
            environ=None) -> int:
    """
    Parse argv, run one command and write its output.

    Returns:
        process exit code
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv: List[str] = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        stderr.write(f"{e.usage}pavane: error: {e}\n")
        return EXIT_USAGE
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    try:
        config = CliConfig.from_args(args, environ)
        setup_logging(config.verbosity, stderr)
        payload, frame, passed = COMMANDS[args.command](args, config)
        errors = schema_errors(command_label(args), json_ready(payload))
        if errors:
            raise InternalInvariantError(f"{command_label(args)} output breaks its schema: {'; '.join(errors)}")
    except InternalInvariantError as e:
        logger.critical("Internal invariant broken: %s", e)
        stderr.write(f"pavane: internal error: {e}\n")
        return EXIT_INTERNAL
    except ResourceCeilingError as e:
        stderr.write(f"pavane: {e}\n")
        return EXIT_CEILING
    except CacheIOError as e:
        stderr.write(f"pavane: cache error: {e}\n")
        return EXIT_USAGE
    except (PavaneError, OSError) as e:
        stderr.write(f"pavane: error: {e}\n")
        return EXIT_USAGE

    stdout.write(render(payload, frame, config.output_format) + '\n')
    return EXIT_OK if passed else EXIT_VERIFICATION_FAILED


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
