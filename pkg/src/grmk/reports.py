"""Line-oriented `key: value` report rendering, shared by the CLI and the
golden-file tests.  The key set is stable and versioned by the header line;
all orderings are deterministic so equal inputs give byte-identical output.
"""

from __future__ import annotations

from .forms import format_form
from .graded import CASE_I, CASE_II, CASE_III

HEADER = "format: grmk.v1"


def _case_lines(desc):
    params = desc.params
    case = desc.case
    lines = [f"m: {desc.m}", f"case: {case.tag}"]
    if case.i is not None:
        lines.append(f"i: {case.i}")
    if case.s is not None:
        lines.append(f"s: {case.s}")
    for i in range(1, params.n + 1):
        lines.append(f"c{i}: {params.threshold(i)}")
    return lines


def _presentation(desc):
    q = desc.params.q
    if desc.branch == "zero":
        return "0"
    if desc.branch == "theta":
        s = desc.b_level
        return (f"coker(theta: O^{q - 2} -> O^{q - 1}/B_{s} (+) O^{q - 2}/B_{s}), "
                f"theta_coeff={desc.theta_coeff}")
    if desc.branch == "zmod":
        j = desc.z_level
        return f"O^{q - 1}/Z_{j} (+) O^{q - 2}/Z_{j}"
    j = desc.z_level
    return f"O^{q - 1}/(1+aC)Z_{j} (+) O^{q - 2}/(1+aC)Z_{j}"


def render_params(params):
    return [
        f"p: {params.p}",
        f"f: {params.f}",
        f"r: {params.r}",
        f"e: {params.e}",
        f"e0: {params.e0}",
        f"n: {params.n}",
        f"q: {params.q}",
        f"a: {params.a}",
    ]


def render_descriptor(desc, order_or_table):
    lines = [HEADER, "report: gr"]
    lines += render_params(desc.params)
    lines += _case_lines(desc)
    lines.append(f"branch: {desc.branch}")
    lines.append(f"presentation: {_presentation(desc)}")
    if desc.params.r == 0:
        lines.append(f"order: {order_or_table}")
    else:
        lines.append("dim_units: GF(p)")
        for beta in sorted(order_or_table):
            key = ",".join(str(x) for x in beta)
            lines.append(f"dim[{key}]: {order_or_table[beta]}")
    return lines


def render_element(el, zero_flag):
    return [
        f"w1: {format_form(el.w1)}",
        f"w2: {format_form(el.w2)}",
        f"is_zero: {'yes' if zero_flag else 'no'}",
    ]


def render_reduce(desc, reduced, zero_flag):
    lines = [HEADER, "report: reduce"]
    lines += render_params(desc.params)
    lines += _case_lines(desc)
    lines += render_element(reduced, zero_flag)
    return lines


def render_symbol(desc, sym_text, el, reduced, zero_flag):
    lines = [HEADER, "report: symbol"]
    lines += render_params(desc.params)
    lines.append(f"symbol: {sym_text}")
    lines.append(f"image_w1: {format_form(el.w1)}")
    lines.append(f"image_w2: {format_form(el.w2)}")
    lines += render_element(reduced, zero_flag)
    return lines


def render_orders(report):
    lines = [HEADER, "report: oracle-orders",
             f"p: {report.p}", f"f: {report.f}", f"e: {report.e}",
             f"n: {report.n}", f"N: {report.N}",
             f"gr0_pi: {report.gr0_pi}", f"gr0_teich: {report.gr0_teich}"]
    for m in sorted(report.orders):
        lines.append(f"gr[{m}]: {report.orders[m]}")
    lines.append(f"total_u1_image: {report.total_u1_image}")
    return lines


def render_compare(cmp_report, stabilization_ok):
    lines = [HEADER, "report: verify-q1"]
    for m, oracle_order, engine_order, match in cmp_report.rows:
        flag = "yes" if match else "no"
        lines.append(f"m={m}: oracle={oracle_order} engine={engine_order} match={flag}")
    lines.append(f"gr0_pi: {cmp_report.gr0_pi}")
    lines.append(f"all_match: {'yes' if cmp_report.all_match else 'no'}")
    lines.append(f"stabilization: {'yes' if stabilization_ok else 'no'}")
    return lines


def render_consistency(rep):
    lines = [HEADER, "report: shift-check",
             f"m: {rep.m}", f"n: {rep.params.n}",
             f"case_high: {rep.case_high!r}", f"case_low: {rep.case_low!r}",
             f"structure: {'ok' if rep.structure_ok else 'MISMATCH'}",
             f"structure_note: {rep.structure_note}"]
    if rep.order_high is not None:
        lines.append(f"order_high: {rep.order_high}")
        lines.append(f"order_low: {rep.order_low}")
        lines.append(f"orders: {'ok' if rep.orders_ok else 'MISMATCH'}")
    for beta, hi, lo in rep.dim_mismatches:
        key = ",".join(str(x) for x in beta)
        lines.append(f"dim_mismatch[{key}]: high={hi} low={lo}")
    for w1_text, w2_text, z_high, z_low in rep.probe_flags:
        lines.append(f"probe_flag: ({w1_text}; {w2_text}) "
                     f"zero_high={z_high} zero_low={z_low}")
    lines.append(f"consistent: {'yes' if rep.consistent else 'no'}")
    return lines


def render_selftest(results, seed, cases):
    lines = [HEADER, "report: selftest", f"seed: {seed}", f"cases: {cases}"]
    ok = True
    for name, passed, detail in results:
        lines.append(f"property: {name}")
        lines.append(f"status: {'ok' if passed else 'FAIL'}")
        if not passed:
            lines.append(f"detail: {detail}")
            ok = False
    lines.append(f"all_ok: {'yes' if ok else 'no'}")
    return lines
