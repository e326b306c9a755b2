"""Template dictionaries with online update.

One dictionary per view, columns are unit-norm feature vectors of N
target templates shared across views (column j of every view is the same
physical template).  Template weights form a probability vector that is
boosted by the solver's coefficients; a sufficiently novel tracking
result replaces the weakest template in every view at once.
"""

from dataclasses import dataclass

import numpy as np

from .features import extract_all_views


@dataclass(frozen=True)
class UpdateConfig:
    similarity_threshold: float = 0.7  # cosine gate on the intensity view
    boost: float = 1.0  # weight multiplier exponent scale

    def __post_init__(self):
        if not 0.0 <= self.similarity_threshold <= 1.0:
            raise ValueError("similarity_threshold must lie in [0, 1]")


@dataclass
class TemplateSet:
    """Per-view dictionaries, template weights and creation-frame indices."""

    dicts: dict  # view id -> (d_k, N) array, unit-norm columns
    weights: np.ndarray  # (N,), nonnegative, sums to 1
    created: np.ndarray  # (N,) frame index each template was taken from
    views: tuple

    @property
    def n_templates(self):
        return self.weights.shape[0]


def init_templates(frame, init_box, n_templates, template_size, rng,
                   feature_cfg=None, views=None):
    """Build the initial dictionaries from the first frame.

    Template 1 is extracted at init_box; templates 2..N at the same box
    shifted by 1-2 px (uniform over {-2,-1,1,2} per axis, drawn from rng).
    Weights start uniform.
    """
    from .features import VIEW_ORDER, FeatureConfig

    if n_templates < 1:
        raise ValueError("need at least one template")
    x, y, w, h = init_box
    if w <= 0 or h <= 0:
        raise ValueError(f"degenerate initial box {init_box}")
    feature_cfg = feature_cfg or FeatureConfig()
    views = tuple(views or VIEW_ORDER)

    shift_pool = np.array([-2, -1, 1, 2])
    columns = {v: [] for v in views}
    for j in range(n_templates):
        if j == 0:
            box = init_box
        else:
            dx, dy = rng.choice(shift_pool, size=2)
            box = (x + dx, y + dy, w, h)
        for vec in extract_all_views(frame, box, template_size, feature_cfg, views):
            columns[vec.view].append(vec.values)
    dicts = {v: np.column_stack(columns[v]) for v in views}
    return TemplateSet(
        dicts=dicts,
        weights=np.full(n_templates, 1.0 / n_templates),
        created=np.zeros(n_templates, dtype=int),
        views=views,
    )


def maybe_update(ts, best_features, best_coeffs, cfg, frame_idx):
    """Boost template weights and possibly swap in the tracking result.

    Weights are multiplied by exp(boost * coefficient) and renormalized.
    If the best candidate's intensity vector has cosine similarity below
    the threshold against every intensity template, the minimum-weight
    template is replaced across all views by the candidate's features and
    given the median weight.  Returns a new TemplateSet.
    """
    coeffs = np.asarray(best_coeffs, dtype=float)
    if coeffs.shape != (ts.n_templates,):
        raise ValueError(f"coefficients have shape {coeffs.shape}, expected ({ts.n_templates},)")
    by_view = {vec.view: vec for vec in best_features}

    weights = ts.weights * np.exp(cfg.boost * coeffs)
    weights = weights / weights.sum()
    dicts = {v: D.copy() for v, D in ts.dicts.items()}
    created = ts.created.copy()

    candidate = by_view.get("intensity")
    if candidate is not None and candidate.normalized:
        # unit-norm columns make the cosine a plain dot product
        similarity = float(np.max(dicts["intensity"].T @ candidate.values))
        if similarity < cfg.similarity_threshold:
            j = int(np.argmin(weights))
            for v in ts.views:
                dicts[v][:, j] = by_view[v].values
            created[j] = frame_idx
            weights[j] = float(np.median(weights))
            weights = weights / weights.sum()

    return TemplateSet(dicts=dicts, weights=weights, created=created, views=ts.views)
