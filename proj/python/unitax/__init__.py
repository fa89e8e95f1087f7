# Copyright 2026 The unitax Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python access to the unitax core.

Taxonomy documents are passed as dicts or JSON text and results come back as
plain Python objects.
"""

import json

from ._unitax import (
    DegenerateInputError,
    DivergenceError,
    Error,
    InvalidClassError,
    LoadError,
    ShapeError,
    ValidationError,
    __version__,
    ba_loss,
    class_counts as _class_counts,
    compile as _compile,
    eval_scores as _eval_scores,
    gradcheck,
    mapping_matrix as _mapping_matrix,
    nll_max,
    nll_plus,
    run_experiment as _run_experiment,
    softmax,
)

__all__ = [
    "DegenerateInputError",
    "DivergenceError",
    "Error",
    "InvalidClassError",
    "LoadError",
    "ShapeError",
    "ValidationError",
    "__version__",
    "ba_loss",
    "class_counts",
    "compile_taxonomy",
    "eval_scores",
    "gradcheck",
    "mapping_matrix",
    "nll_max",
    "nll_plus",
    "run_experiment",
    "softmax",
]


def _text(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def compile_taxonomy(doc):
    """Universal taxonomy of a taxonomy document (dict or JSON text)."""
    return json.loads(_compile(_text(doc)))


def class_counts(doc):
    """Class counts of the universal, naive and partial-merge label spaces."""
    return dict(_class_counts(_text(doc)))


def mapping_matrix(doc, dataset, kind="universal", direction="train"):
    return json.loads(_mapping_matrix(_text(doc), kind, dataset, direction))


def eval_scores(doc, dataset, probabilities, kind="universal"):
    """Dict from evaluation class (and "void") to its summed probability."""
    names, scores = _eval_scores(_text(doc), kind, dataset, list(probabilities))
    return dict(zip(names, scores))


def run_experiment(seed=0, epochs=200, models=()):
    return json.loads(_run_experiment(seed, epochs, list(models)))
