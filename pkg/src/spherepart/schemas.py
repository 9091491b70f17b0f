"""JSON schemas for the reports written by the command-line tool."""

_num = {"type": "number"}
_int = {"type": "integer"}
_str = {"type": "string"}


def _obj(props: dict, required=None, extra=False) -> dict:
    return {"type": "object", "properties": props,
            "required": list(props) if required is None else required,
            "additionalProperties": extra}


CATALOG = {
    "type": "array",
    "items": _obj({"name": _str, "n": _int, "perimeter": _num, "closed_form": _str,
                   "region_area": _num, "lower_bound": _num, "ratio": _num}),
}

_check = _obj({"check": _str, "passed": {"type": "boolean"},
               "offenders": {"type": "array"}, "deviation": {"type": ["number", "null"]},
               "note": _str})

CHECK_NET = _obj({
    "file": _str,
    "ok": {"type": "boolean"},
    "checks": {"type": "array", "items": _check},
    "region_areas": {"type": "object", "additionalProperties": _num},
    "perimeter": _num,
})

VERIFY = _obj({
    "header": _obj({"rounding_mode": _str, "pi_width": _num}),
    "claims": {"type": "array", "items": _obj({
        "id": {"type": "string", "pattern": "^C[0-9]+$"},
        "statement": _str,
        "anchor": _str,
        "status": {"enum": ["certified", "failed", "undecided"]},
        "margin": {"type": ["number", "null"]},
        "depends_on": {"type": "array", "items": _str},
        "note": _str,
    })},
    "certified": {"type": "boolean"},
    "summary": _str,
})

PROFILE = _obj({"area": _num, "profile": _num})

_edge_fit = _obj({"edge": _int, "kappa": _num, "deviation": _num,
                  "pressure_mismatch": {"type": ["number", "null"]}})

OPTIMIZE = _obj({
    "status": {"enum": ["converged", "max_iterations", "collision"]},
    "iterations": _int,
    "m": _int,
    "seed": _int,
    "perturb": _num,
    "perimeter": _num,
    "kkt_norm": _num,
    "max_residual": _num,
    "residuals": {"type": "array", "items": _obj({"region": _int, "value": _num,
                                                  "reliable": {"type": "boolean"}})},
    "pressures": {"type": "array", "items": _num},
    "edges": {"type": "array", "items": _edge_fit},
    "vertex_angles": {"type": "object", "additionalProperties": {"type": "array", "items": _num}},
    "max_angle_error_deg": _num,
    "flagged_edges": {"type": "array", "items": _int},
})

RENDER = _obj({"out": _str, "regions": _int, "width": _int, "height": _int})

SCHEMAS = {"catalog": CATALOG, "check-net": CHECK_NET, "verify": VERIFY,
           "profile": PROFILE, "optimize": OPTIMIZE, "render": RENDER}
