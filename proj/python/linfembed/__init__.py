"""Bi-Lipschitz embeddings of finite pointed metric spaces into sup-norm
block sums, with certified distortion bounds.

The python module runs in float arithmetic; exact rational certification is
available through the ``linfembed`` CLI, which reads and writes the same
JSON documents as :meth:`MetricSpace.to_json` / :meth:`Embedding.to_json`.
"""

from ._core import (
    CertificationError,
    DomainError,
    Embedding,
    InputError,
    MetricSpace,
    __version__,
    amalgamate,
    embed,
    from_graph,
    generate,
    geometry_profile,
    kuratowski,
)

__all__ = [
    "CertificationError",
    "DomainError",
    "Embedding",
    "InputError",
    "MetricSpace",
    "__version__",
    "amalgamate",
    "embed",
    "from_graph",
    "generate",
    "geometry_profile",
    "kuratowski",
]
