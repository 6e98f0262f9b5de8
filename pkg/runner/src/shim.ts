/**
 * Python harness injected around the generated script.
 *
 * The script runs with the sympy helpers already in scope (the dialect's
 * templates carry no import statements), its entry function `solution()` is
 * invoked, and the returned values are normalized to decimals with 12
 * significant digits and written to a result file.  Anything the script
 * prints stays on stdout/stderr and never mixes with the result.
 */
export const PY_SHIM = `
import json
import sys


def _to_number(value):
    import sympy

    num = sympy.N(value, 15)
    if getattr(num, "is_real", None) is False:
        raise RuntimeError("non-real result: %r" % (value,))
    x = float(num)
    return float("%.12g" % x)


def _normalize(value):
    answers = []
    if isinstance(value, dict):
        for key, entry in value.items():
            answers.append({"name": str(key), "value": _to_number(entry)})
    elif isinstance(value, (list, tuple)):
        for entry in value:
            answers.append({"name": None, "value": _to_number(entry)})
    else:
        answers.append({"name": None, "value": _to_number(value)})
    return answers


def _main():
    script_path, result_path = sys.argv[1], sys.argv[2]
    import sympy
    from sympy import Eq, Rational, Symbol, solve, sqrt, symbols

    namespace = {
        "symbols": symbols,
        "Eq": Eq,
        "solve": solve,
        "Rational": Rational,
        "sqrt": sqrt,
        "Symbol": Symbol,
        "pi": sympy.pi,
        "sympy": sympy,
    }
    with open(script_path, "r", encoding="utf-8") as fh:
        source = fh.read()
    exec(compile(source, "script.py", "exec"), namespace)
    entry = namespace.get("solution")
    if not callable(entry):
        raise RuntimeError("script does not define a callable solution()")
    answers = _normalize(entry())
    if not answers:
        raise RuntimeError("solution() returned no numeric answers")
    with open(result_path, "w", encoding="utf-8") as fh:
        json.dump({"answers": answers}, fh)


_main()
`;
