"""JSON Schemas of the command-line output (trace steps, traces, verdicts)."""

STEP = {
    "type": "object",
    "required": ["step", "rule", "agents", "state"],
    "properties": {
        "step": {"type": "integer", "minimum": 1},
        "rule": {"enum": ["Tau", "Tell1", "Tell2", "Fuse", "Ask", "Do"]},
        "agents": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "session": {"type": "string"},
        "label": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "sigma": {"type": "object", "additionalProperties": {"type": "string"}},
        "state": {"type": "string"},
    },
    "additionalProperties": False,
}

TRACE = {
    "type": "object",
    "required": ["initial", "steps", "final", "stuck", "maxStepsExceeded"],
    "properties": {
        "initial": {"type": "string"},
        "steps": {"type": "array", "items": STEP},
        "final": {"type": "string"},
        "stuck": {"type": "boolean"},
        "maxStepsExceeded": {"type": "boolean"},
    },
    "additionalProperties": False,
}

VERDICT = {
    "type": "object",
    "required": ["principal", "verdict"],
    "properties": {
        "principal": {"type": "string"},
        "verdict": {"enum": ["honest", "dishonest", "inconclusive"]},
        "witness": {"type": "array", "items": STEP},
        "loop": {"type": "array", "items": STEP},
        "session": {"type": "string"},
        "obligations": {"type": "array", "items": {"type": "string"}},
        "states": {"type": "integer", "minimum": 0},
        "reason": {"type": "string"},
    },
    "additionalProperties": False,
}

AGREEMENT = {
    "type": "object",
    "required": ["broker", "fused", "sigma", "session", "observable"],
    "properties": {
        "broker": {"type": "string"},
        "fused": {"type": "array", "items": {"type": "string"}},
        "sigma": {"type": "object", "additionalProperties": {"type": "string"}},
        "session": {"type": "string"},
        "observable": {"type": "string"},
        "obligations": {"type": "object"},
    },
    "additionalProperties": False,
}
