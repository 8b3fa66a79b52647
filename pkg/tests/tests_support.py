"""Small helpers shared across test modules."""


def eps_halving_ratios(report_db, model, keys):
    """Consecutive fitted-constant ratios (smaller eps over larger) per key."""
    eps_values = sorted({eps for (m, eps) in report_db if m == model}, reverse=True)
    ratios = {}
    for key in keys:
        vals = [getattr(report_db[(model, eps)], key) for eps in eps_values]
        for a, b, eps in zip(vals, vals[1:], eps_values[1:]):
            ratios[(key, eps)] = b / a
    return ratios
