"""Minimal dense-network numerics on numpy: explicit forward tapes,
hand-derived backward passes, Adam, and gradient checking.

Everything trainable lives in flat ``dict[str, np.ndarray]`` maps so the
optimizer, checkpoints and finite-difference checks can treat models
uniformly. Structured views (MLP stacks, message-passing blocks) carry the
shapes and activations and convert to/from those dicts by key prefix.

All math is float64. Forward functions accept a single vector ``(d,)`` or
a batch ``(n, d)`` and return matching shapes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import DegenerateMask, DimMismatch, FormatError

ParamDict = dict[str, np.ndarray]

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

NORM_EPS = 1e-12
PRED_CLIP = 1e-7

CKPT_MAGIC = "DYTAG-CKPT"
CKPT_VERSION = "v1"


def _rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


# ---------------------------------------------------------------------------
# activations


def relu(z: np.ndarray) -> np.ndarray:
    return np.maximum(z, 0.0)


def relu_grad(z: np.ndarray) -> np.ndarray:
    return (z > 0.0).astype(np.float64)


_ACTIVATIONS: dict[str, tuple[Callable, Callable]] = {
    "relu": (relu, relu_grad),
    "identity": (lambda z: z, lambda z: np.ones_like(z)),
}


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


# ---------------------------------------------------------------------------
# MLP stacks


@dataclass(frozen=True)
class MlpLayer:
    weight: np.ndarray  # (out, in)
    bias: np.ndarray  # (out,)
    activation: str

    def __post_init__(self):
        if self.activation not in _ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.weight.ndim != 2 or self.bias.shape != (self.weight.shape[0],):
            raise DimMismatch(
                f"layer shapes {self.weight.shape} / {self.bias.shape} inconsistent"
            )


@dataclass(frozen=True)
class MlpParams:
    layers: tuple[MlpLayer, ...]

    @property
    def in_dim(self) -> int:
        return self.layers[0].weight.shape[1]

    @property
    def out_dim(self) -> int:
        return self.layers[-1].weight.shape[0]

    def to_dict(self, prefix: str) -> ParamDict:
        out: ParamDict = {}
        for i, layer in enumerate(self.layers):
            out[f"{prefix}.w{i}"] = layer.weight
            out[f"{prefix}.b{i}"] = layer.bias
        return out

    def from_dict(self, prefix: str, params: ParamDict) -> "MlpParams":
        """Same structure, arrays replaced by the dict's entries."""
        return MlpParams(
            tuple(
                MlpLayer(params[f"{prefix}.w{i}"], params[f"{prefix}.b{i}"], l.activation)
                for i, l in enumerate(self.layers)
            )
        )


def init_mlp(
    in_dim: int, out_dim: int, n_layers: int, seed, hidden_dim: int | None = None
) -> MlpParams:
    """Stack of ``n_layers`` affine layers mapping in_dim -> out_dim through
    hidden widths of ``hidden_dim`` (out_dim when omitted), relu between
    layers, identity at the end.

    Weights draw from N(0, 2/fan_in) for relu layers and N(0, 1/fan_in)
    otherwise; biases start at zero.
    """
    if min(in_dim, out_dim, n_layers) < 1:
        raise ValueError("dims and layer count must be >= 1")
    hidden = out_dim if hidden_dim is None else hidden_dim
    rng = _rng(seed)
    layers = []
    for i in range(n_layers):
        d_in = in_dim if i == 0 else hidden
        d_out = out_dim if i == n_layers - 1 else hidden
        act = "identity" if i == n_layers - 1 else "relu"
        gain = 2.0 if act == "relu" else 1.0
        w = rng.standard_normal((d_out, d_in)) * math.sqrt(gain / d_in)
        layers.append(MlpLayer(w, np.zeros(d_out), act))
    return MlpParams(tuple(layers))


def mlp_forward(params: MlpParams, x: np.ndarray) -> tuple[np.ndarray, list]:
    """Returns (output, tape). The tape holds (input, pre-activation) per
    layer and feeds mlp_backward."""
    squeeze = x.ndim == 1
    h = x[None, :] if squeeze else x
    tape = []
    for layer in params.layers:
        z = h @ layer.weight.T + layer.bias
        tape.append((h, z))
        h = _ACTIVATIONS[layer.activation][0](z)
    return (h[0] if squeeze else h), tape


def mlp_backward(
    params: MlpParams, tape: list, grad_out: np.ndarray, prefix: str
) -> tuple[np.ndarray, ParamDict]:
    """Backprop through a taped forward pass. Returns the gradient at the
    input and parameter gradients keyed like ``to_dict(prefix)``."""
    squeeze = grad_out.ndim == 1
    g = grad_out[None, :] if squeeze else grad_out
    grads: ParamDict = {}
    for i in range(len(params.layers) - 1, -1, -1):
        layer = params.layers[i]
        x, z = tape[i]
        gz = g * _ACTIVATIONS[layer.activation][1](z)
        grads[f"{prefix}.w{i}"] = gz.T @ x
        grads[f"{prefix}.b{i}"] = gz.sum(axis=0)
        g = gz @ layer.weight
    return (g[0] if squeeze else g), grads


@dataclass(frozen=True)
class MessagePassingParams:
    """One edge-conditioned message-passing block.

    Messages from neighbor w to u concatenate the neighbor state with the
    edge's time-augmented pair representation; updates concatenate the node's
    own state with the aggregated message.
    """

    w_msg: np.ndarray  # (d, 2d + enc_len)
    b_msg: np.ndarray  # (d,)
    w_upd: np.ndarray  # (d, 2d)
    b_upd: np.ndarray  # (d,)

    def to_dict(self, prefix: str) -> ParamDict:
        return {
            f"{prefix}.w_msg": self.w_msg,
            f"{prefix}.b_msg": self.b_msg,
            f"{prefix}.w_upd": self.w_upd,
            f"{prefix}.b_upd": self.b_upd,
        }

    def from_dict(self, prefix: str, params: ParamDict) -> "MessagePassingParams":
        return MessagePassingParams(
            params[f"{prefix}.w_msg"],
            params[f"{prefix}.b_msg"],
            params[f"{prefix}.w_upd"],
            params[f"{prefix}.b_upd"],
        )


def init_message_passing(d: int, enc_len: int, seed) -> MessagePassingParams:
    rng = _rng(seed)
    msg_in = 2 * d + enc_len
    upd_in = 2 * d
    return MessagePassingParams(
        rng.standard_normal((d, msg_in)) * math.sqrt(2.0 / msg_in),
        np.zeros(d),
        rng.standard_normal((d, upd_in)) * math.sqrt(2.0 / upd_in),
        np.zeros(d),
    )


# ---------------------------------------------------------------------------
# losses


def l2_normalize(v: np.ndarray) -> np.ndarray:
    return v / (float(np.linalg.norm(v)) + NORM_EPS)


def _normalize_vjp(v: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Gradient of x -> x/(|x|+eps) applied to upstream gradient g."""
    s = float(np.linalg.norm(v))
    out = g / (s + NORM_EPS)
    if s > 0.0:
        out -= v * (float(v @ g) / (s * (s + NORM_EPS) ** 2))
    return out


def kd_loss(h_st: np.ndarray, h_tx: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """Distillation penalty exp(-cos(h_st, h_tx)) with gradients for both
    inputs. Both vectors are L2-normalized first, so the value only depends
    on directions and lies in [e^-1, e^1]."""
    if h_st.shape != h_tx.shape:
        raise DimMismatch(f"shape mismatch {h_st.shape} vs {h_tx.shape}")
    a = l2_normalize(h_st)
    b = l2_normalize(h_tx)
    loss = math.exp(-float(a @ b))
    g_a = -loss * b
    g_b = -loss * a
    return loss, _normalize_vjp(h_st, g_a), _normalize_vjp(h_tx, g_b)


def bce_masked(pred: np.ndarray, target: np.ndarray, mask: np.ndarray) -> float:
    """Mean binary cross-entropy over unmasked positions. pred holds
    probabilities (clipped away from 0/1 for the log), target holds 0/1,
    mask is boolean with True = counts toward the loss."""
    if pred.shape != target.shape or pred.shape != mask.shape:
        raise DimMismatch(f"shapes {pred.shape}/{target.shape}/{mask.shape} differ")
    n = int(mask.sum())
    if n == 0:
        raise DegenerateMask("loss mask excludes every position")
    p = np.clip(pred[mask], PRED_CLIP, 1.0 - PRED_CLIP)
    t = target[mask]
    return float(-np.mean(t * np.log(p) + (1.0 - t) * np.log(1.0 - p)))


def bce_masked_grad_logits(
    pred: np.ndarray, target: np.ndarray, mask: np.ndarray
) -> np.ndarray:
    """Gradient of bce_masked w.r.t. the logits that produced ``pred`` via a
    sigmoid: (p - t)/n on unmasked positions, 0 elsewhere."""
    n = int(mask.sum())
    if n == 0:
        raise DegenerateMask("loss mask excludes every position")
    g = (pred - target) / n
    g[~mask] = 0.0
    return g


def softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_xent(logits: np.ndarray, labels: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean cross-entropy of integer labels under softmax(logits); returns
    (loss, gradient w.r.t. logits). logits is (n, C), labels (n,)."""
    n = logits.shape[0]
    if n == 0:
        raise DegenerateMask("no rows to average cross-entropy over")
    shifted = logits - logits.max(axis=1, keepdims=True)
    logz = np.log(np.exp(shifted).sum(axis=1))
    loss = float(np.mean(logz - shifted[np.arange(n), labels]))
    grad = softmax(logits)
    grad[np.arange(n), labels] -= 1.0
    return loss, grad / n


# ---------------------------------------------------------------------------
# optimizer


@dataclass(frozen=True)
class AdamState:
    m: ParamDict
    v: ParamDict
    t: int


def init_adam(params: ParamDict) -> AdamState:
    zeros = lambda: {k: np.zeros_like(a) for k, a in params.items()}
    return AdamState(zeros(), zeros(), 0)


def adam_step(
    state: AdamState, params: ParamDict, grads: ParamDict, lr: float
) -> tuple[ParamDict, AdamState]:
    """One Adam update. Pure: inputs are untouched, fresh dicts come back.
    Params without a gradient entry are treated as zero-gradient; gradient
    keys that match no parameter are an error."""
    unknown = set(grads) - set(params)
    if unknown:
        raise KeyError(f"gradients for unknown parameters: {sorted(unknown)}")
    t = state.t + 1
    bc1 = 1.0 - ADAM_BETA1**t
    bc2 = 1.0 - ADAM_BETA2**t
    new_params: ParamDict = {}
    new_m: ParamDict = {}
    new_v: ParamDict = {}
    for name, p in params.items():
        g = grads.get(name)
        if g is None:
            g = np.zeros_like(p)
        m = ADAM_BETA1 * state.m[name] + (1.0 - ADAM_BETA1) * g
        v = ADAM_BETA2 * state.v[name] + (1.0 - ADAM_BETA2) * g * g
        new_m[name] = m
        new_v[name] = v
        new_params[name] = p - lr * (m / bc1) / (np.sqrt(v / bc2) + ADAM_EPS)
    return new_params, AdamState(new_m, new_v, t)


# ---------------------------------------------------------------------------
# verification


def grad_check(
    f: Callable[[ParamDict], tuple[float, ParamDict]],
    params: ParamDict,
    eps: float = 1e-5,
) -> float:
    """Max relative error between analytic and central finite-difference
    gradients over every coordinate of every parameter.

    ``f(params)`` must return (loss, grads). Relative error uses
    |a - n| / max(|a|, |n|, 1e-6).
    """
    _, grads = f(params)
    worst = 0.0
    for name, p in params.items():
        analytic = grads.get(name)
        if analytic is None:
            analytic = np.zeros_like(p)
        for i in range(p.size):
            orig = p.flat[i]
            p.flat[i] = orig + eps
            hi, _ = f(params)
            p.flat[i] = orig - eps
            lo, _ = f(params)
            p.flat[i] = orig
            numeric = (hi - lo) / (2.0 * eps)
            a = float(analytic.flat[i])
            err = abs(a - numeric) / max(abs(a), abs(numeric), 1e-6)
            worst = max(worst, err)
    return worst


# ---------------------------------------------------------------------------
# checkpoints


def save_checkpoint(path: str | Path, params: ParamDict) -> None:
    """Binary dump: ``DYTAG-CKPT v1 <n>`` header line, then per array (in
    name order) one ``<name> <d0> <d1> ...`` line followed by row-major
    little-endian float64 bytes."""
    chunks = [f"{CKPT_MAGIC} {CKPT_VERSION} {len(params)}\n".encode("ascii")]
    for name in sorted(params):
        if " " in name or "\n" in name:
            raise ValueError(f"parameter name {name!r} not storable")
        arr = np.ascontiguousarray(params[name], dtype="<f8")
        dims = " ".join(str(d) for d in arr.shape)
        chunks.append(f"{name} {dims}\n".encode("utf-8") if dims else f"{name}\n".encode("utf-8"))
        chunks.append(arr.tobytes())
    Path(path).write_bytes(b"".join(chunks))


def load_checkpoint(path: str | Path) -> ParamDict:
    data = Path(path).read_bytes()
    nl = data.find(b"\n")
    if nl < 0:
        raise FormatError(f"{path}: truncated header")
    head = data[:nl].decode("ascii", errors="replace").split(" ")
    if len(head) != 3 or head[0] != CKPT_MAGIC or head[1] != CKPT_VERSION:
        raise FormatError(f"{path}: bad checkpoint header")
    try:
        count = int(head[2])
    except ValueError:
        raise FormatError(f"{path}: bad array count") from None
    pos = nl + 1
    params: ParamDict = {}
    for _ in range(count):
        nl = data.find(b"\n", pos)
        if nl < 0:
            raise FormatError(f"{path}: truncated array header")
        fields = data[pos:nl].decode("utf-8").split(" ")
        name, dims = fields[0], fields[1:]
        try:
            shape = tuple(int(d) for d in dims)
        except ValueError:
            raise FormatError(f"{path}: bad shape for {name!r}") from None
        size = 8 * int(np.prod(shape, dtype=np.int64)) if shape else 8
        pos = nl + 1
        if pos + size > len(data):
            raise FormatError(f"{path}: truncated data for {name!r}")
        params[name] = np.frombuffer(
            data[pos : pos + size], dtype="<f8"
        ).reshape(shape).astype(np.float64)
        pos += size
    if pos != len(data):
        raise FormatError(f"{path}: {len(data) - pos} trailing bytes")
    return params
