"""Published JSON Schemas for the CLI report formats."""

LOGICAL_MATRIX = {
    "type": "object",
    "required": ["rows", "cols"],
    "properties": {
        "rows": {"type": "integer", "minimum": 1},
        "cols": {"type": "array", "minItems": 1,
                 "items": {"type": "integer", "minimum": 1}},
    },
    "additionalProperties": False,
}

INT_MATRIX = {
    "type": "object",
    "required": ["rows", "colsDense"],
    "properties": {
        "rows": {"type": "integer", "minimum": 1},
        "colsDense": {"type": "array", "minItems": 1,
                      "items": {"type": "array",
                                "items": {"type": "integer"}}},
    },
    "additionalProperties": False,
}

LATTICE = {
    "type": "object",
    "required": ["k", "labels", "join"],
    "properties": {
        "k": {"type": "integer", "minimum": 1},
        "labels": {"type": "array", "items": {"type": "string"}},
        "join": LOGICAL_MATRIX,
    },
    "additionalProperties": False,
}

ASSR = {
    "type": "object",
    "required": ["k", "n", "m", "M", "components", "E"],
    "properties": {
        "k": {"type": "integer", "minimum": 1},
        "n": {"type": "integer", "minimum": 1},
        "m": {"type": "integer", "minimum": 0},
        "M": LOGICAL_MATRIX,
        "components": {"type": "array", "items": LOGICAL_MATRIX},
        "E": {"oneOf": [LOGICAL_MATRIX, {"type": "null"}]},
    },
    "additionalProperties": False,
}

_STATE = {"type": "array", "items": {"type": "string"}}
_PAIR = {"type": "array", "minItems": 2, "maxItems": 2, "items": _STATE}
_LABEL_PAIR = {"type": "array", "minItems": 2, "maxItems": 2,
               "items": {"type": "string"}}

CHECK_LATTICE_REPORT = {
    "type": "object",
    "required": ["command", "lattice", "ok", "axiom", "witness"],
    "properties": {
        "command": {"const": "check-lattice"},
        "lattice": {"type": "string"},
        "ok": {"type": "boolean"},
        "axiom": {"oneOf": [{"type": "string"}, {"type": "null"}]},
        "witness": {"oneOf": [{"type": "array",
                               "items": {"type": "string"}},
                              {"type": "null"}]},
    },
    "additionalProperties": False,
}

COMPILE_REPORT = {
    "type": "object",
    "required": ["command", "network", "assr"],
    "properties": {
        "command": {"const": "compile"},
        "network": {"type": "string"},
        "assr": ASSR,
    },
    "additionalProperties": False,
}

CONTROLLABILITY_REPORT = {
    "type": "object",
    "required": ["command", "network", "states", "matrix", "controllable",
                 "witness", "query"],
    "properties": {
        "command": {"const": "controllability"},
        "network": {"type": "string"},
        "states": {"type": "integer", "minimum": 1},
        "matrix": {"type": "array", "items": {"type": "string",
                                              "pattern": "^[01]+$"}},
        "controllable": {"type": "boolean"},
        "witness": {"oneOf": [
            {"type": "object",
             "required": ["to", "from"],
             "properties": {"to": _STATE, "from": _STATE},
             "additionalProperties": False},
            {"type": "null"}]},
        "query": {"oneOf": [
            {"type": "object",
             "required": ["from", "to", "reachable"],
             "properties": {"from": _STATE, "to": _STATE,
                            "reachable": {"type": "boolean"}},
             "additionalProperties": False},
            {"type": "null"}]},
    },
    "additionalProperties": False,
}

OBSERVABILITY_REPORT = {
    "type": "object",
    "required": ["command", "network", "mode", "observable", "witness",
                 "distinguishable_pairs", "indicator"],
    "properties": {
        "command": {"const": "observability"},
        "network": {"type": "string"},
        "mode": {"enum": ["paper", "standard"]},
        "observable": {"type": "boolean"},
        "witness": {"oneOf": [_PAIR, {"type": "null"}]},
        "distinguishable_pairs": {"type": "array", "items": _PAIR},
        "indicator": {"type": "string", "pattern": "^[01]+$"},
    },
    "additionalProperties": False,
}

FACTOR_REPORT = {
    "type": "object",
    "required": ["command", "network", "property", "factors",
                 "product_holds", "combination"],
    "properties": {
        "command": {"const": "factor"},
        "network": {"type": "string"},
        "property": {"enum": ["observability", "controllability"]},
        "mode": {"enum": ["paper", "standard"]},
        "factors": {"type": "array", "items": {
            "type": "object",
            "required": ["k", "assr", "holds"],
            "properties": {
                "k": {"type": "integer"},
                "labels": {"type": "array", "items": {"type": "string"}},
                "assr": ASSR,
                "holds": {"type": "boolean"},
                "witness": {},
                "distinguishable_pairs": {"type": "array", "items": _PAIR},
            },
            "additionalProperties": False}},
        "product_holds": {"type": "boolean"},
        "combination": {"type": "object"},
    },
    "additionalProperties": False,
}

RECOVER_REPORT = {
    "type": "object",
    "required": ["command", "k", "mode", "labels", "live_vars",
                 "component_graphs", "conjunction", "ok", "stage", "failure",
                 "sorting", "orientation", "lattice",
                 "generated_by_basic_operators"],
    "properties": {
        "command": {"const": "recover"},
        "source": {"type": "string"},
        "k": {"type": "integer", "minimum": 2},
        "mode": {"enum": ["monotone", "comparable"]},
        "labels": {"type": "array", "items": {"type": "string"}},
        "live_vars": {"type": "array",
                      "items": {"type": "array",
                                "items": {"type": "integer"}}},
        "component_graphs": {"type": "array",
                             "items": {"type": "array",
                                       "items": _LABEL_PAIR}},
        "conjunction": {"type": "array", "items": _LABEL_PAIR},
        "ok": {"type": "boolean"},
        "stage": {"enum": ["orientation", "lattice", "done"]},
        "failure": {"oneOf": [{"type": "string"}, {"type": "null"}]},
        "sorting": {"type": "string"},
        "orientation": {"oneOf": [{"type": "array", "items": _LABEL_PAIR},
                                  {"type": "null"}]},
        "lattice": {"oneOf": [LATTICE, {"type": "null"}]},
        "bottom": {"type": "string"},
        "top": {"type": "string"},
        "generated_by_basic_operators": {"type": "boolean"},
    },
    "additionalProperties": False,
}

SIMULATE_REPORT = {
    "type": "object",
    "required": ["command", "network", "x0", "inputs", "trajectory",
                 "outputs"],
    "properties": {
        "command": {"const": "simulate"},
        "network": {"type": "string"},
        "x0": _STATE,
        "inputs": {"type": "array", "items": _STATE},
        "trajectory": {"type": "array", "items": _STATE},
        "outputs": {"oneOf": [{"type": "array", "items": _STATE},
                              {"type": "null"}]},
    },
    "additionalProperties": False,
}

BY_COMMAND = {
    "check-lattice": CHECK_LATTICE_REPORT,
    "compile": COMPILE_REPORT,
    "controllability": CONTROLLABILITY_REPORT,
    "observability": OBSERVABILITY_REPORT,
    "factor": FACTOR_REPORT,
    "recover": RECOVER_REPORT,
    "simulate": SIMULATE_REPORT,
}
