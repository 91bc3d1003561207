"""Training and evaluation for future link prediction (flp) and edge
classification (ec) on dynamic text-attributed graphs.

The student side projects frozen text embeddings of node and relation
descriptions into a shared space, runs edge-conditioned message passing
where each edge feature is its relation embedding concatenated with the
temporal encoding, and represents a candidate edge as the Hadamard product
of its endpoint states. The flp head predicts the full temporal encoding
vector (masked BCE against the true encoding, all-zero target for sampled
fake edges); the ec head predicts the label by softmax cross-entropy.

The teacher side describes each candidate edge in text (both endpoint
neighborhoods plus an existence statement), embeds the prompts with a
frozen provider, projects them with a trainable MLP, and pulls the student
representation toward the teacher one with an exp(-cosine) penalty. Both
MLPs train jointly; the embedding providers never receive gradients.

Everything here is deterministic given (graph, config, provider): sampling
uses explicit integer seeds, parallel work reduces in fixed order, and
reports serialize with sorted keys.
"""

from __future__ import annotations

import bisect
import json
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .embed import EmbeddingProvider, link_prompt, neighbor_prompt
from .encoding import encode_positive
from .errors import ConfigError, EmptyEvalSet
from .graph import DyTag, SplitSpec, TemporalEdge, chronological_split, \
    inductive_test_filter, sample_negative_edges
from .metrics import average_precision, precision_recall_f1, roc_auc
from .nn import AdamState, MessagePassingParams, MlpParams, NORM_EPS, ParamDict, \
    adam_step, bce_masked, bce_masked_grad_logits, init_adam, init_message_passing, \
    init_mlp, mlp_backward, mlp_forward, relu_grad, sigmoid, softmax, softmax_xent

TASKS = ("flp", "ec")

# seed offsets keep evaluation sampling streams away from the per-epoch
# training streams (cfg.seed + epoch)
_EVAL_SEED_OFFSET = 900_001
_SHUFFLE_MULT = 2_000_003
_SHUFFLE_OFFSET = 1_000_001


@dataclass(frozen=True)
class TrainConfig:
    d_student: int = 32
    d_teacher: int = 32
    d_enc: int = 16
    d_llm: int = 24
    mlp_layers_student: int = 2
    mlp_layers_teacher: int = 2
    gnn_layers: int = 1
    lambda_flp: float = 1.0
    lambda_ec: float = 1.0
    lambda_kd: float = 1.0
    batch_size: int = 128
    learning_rate: float = 0.001
    epochs: int = 50
    seed: int = 0
    split: SplitSpec = field(default_factory=SplitSpec)
    kd_enabled: bool = True
    temporal_encoding_enabled: bool = True
    leakage_guard: bool = True
    teacher_include_focal_edge: bool = True
    workers: int = 1

    def __post_init__(self):
        dims = {
            "d_student": self.d_student,
            "d_teacher": self.d_teacher,
            "d_enc": self.d_enc,
            "d_llm": self.d_llm,
            "mlp_layers_student": self.mlp_layers_student,
            "mlp_layers_teacher": self.mlp_layers_teacher,
            "gnn_layers": self.gnn_layers,
            "batch_size": self.batch_size,
            "epochs": self.epochs,
            "workers": self.workers,
        }
        for name, v in dims.items():
            if v < 1:
                raise ConfigError(f"{name} must be >= 1, got {v}")
        for name, v in (
            ("lambda_flp", self.lambda_flp),
            ("lambda_ec", self.lambda_ec),
            ("lambda_kd", self.lambda_kd),
        ):
            if v < 0:
                raise ConfigError(f"{name} must be >= 0, got {v}")
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.kd_enabled and self.d_student != self.d_teacher:
            raise ConfigError(
                "distillation compares student and teacher vectors directly; "
                f"d_student={self.d_student} != d_teacher={self.d_teacher}"
            )

    @property
    def effective_lambda_kd(self) -> float:
        return self.lambda_kd if self.kd_enabled else 0.0


@dataclass(frozen=True)
class StudentModel:
    """All trainable blocks; embedding providers stay outside and frozen."""

    node_mlp: MlpParams  # shared projection for node and relation text
    passing: tuple[MessagePassingParams, ...]
    flp_head: MlpParams  # d_student -> T+k logits
    ec_head: MlpParams  # d_student -> |labels| logits
    teacher_mlp: MlpParams  # d_llm -> d_teacher

    def to_params(self) -> ParamDict:
        out = self.node_mlp.to_dict("node_mlp")
        for i, mp in enumerate(self.passing):
            out.update(mp.to_dict(f"mp{i}"))
        out.update(self.flp_head.to_dict("flp_head"))
        out.update(self.ec_head.to_dict("ec_head"))
        out.update(self.teacher_mlp.to_dict("teacher_mlp"))
        return out

    def with_params(self, params: ParamDict) -> "StudentModel":
        return StudentModel(
            self.node_mlp.from_dict("node_mlp", params),
            tuple(
                mp.from_dict(f"mp{i}", params) for i, mp in enumerate(self.passing)
            ),
            self.flp_head.from_dict("flp_head", params),
            self.ec_head.from_dict("ec_head", params),
            self.teacher_mlp.from_dict("teacher_mlp", params),
        )


def init_model(cfg: TrainConfig, temporal_len: int, num_labels: int) -> StudentModel:
    children = np.random.SeedSequence(cfg.seed).spawn(4 + cfg.gnn_layers)
    node_mlp = init_mlp(cfg.d_enc, cfg.d_student, cfg.mlp_layers_student, children[0])
    passing = tuple(
        init_message_passing(cfg.d_student, temporal_len, children[1 + i])
        for i in range(cfg.gnn_layers)
    )
    flp_head = init_mlp(
        cfg.d_student, temporal_len, cfg.mlp_layers_student,
        children[1 + cfg.gnn_layers], hidden_dim=cfg.d_student,
    )
    ec_head = init_mlp(
        cfg.d_student, num_labels, cfg.mlp_layers_student,
        children[2 + cfg.gnn_layers], hidden_dim=cfg.d_student,
    )
    teacher_mlp = init_mlp(
        cfg.d_llm, cfg.d_teacher, cfg.mlp_layers_teacher, children[3 + cfg.gnn_layers]
    )
    return StudentModel(node_mlp, passing, flp_head, ec_head, teacher_mlp)


def _parallel_map(fn, items, workers: int) -> list:
    """Order-preserving map; thread pool when workers > 1. Results are
    reassembled by index so the reduction order never depends on timing."""
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# precomputed per-graph state


class _Workspace:
    """Frozen inputs shared by every training step on one graph."""

    def __init__(self, g: DyTag, cfg: TrainConfig, enc: EmbeddingProvider):
        self.g = g
        self.cfg = cfg
        self.length = g.time_horizon.length
        n = g.node_count

        self.enc_nodes = np.stack(
            [enc.embed(g.node_text(u)) for u in range(n)]
        ) if n else np.zeros((0, cfg.d_enc))

        rel_ids = sorted({e.relation_id for e in g.edges})
        row_of = {r: i for i, r in enumerate(rel_ids)}
        self.enc_rels = np.stack(
            [enc.embed(g.relation_text.text(r)) for r in rel_ids]
        ) if rel_ids else np.zeros((0, cfg.d_enc))
        self.rel_rows = np.array([row_of[e.relation_id] for e in g.edges], dtype=np.int64)

        tau = np.stack(
            [encode_positive(e.timestamp, g.time_horizon).as_float() for e in g.edges]
        ) if g.edges else np.zeros((0, self.length))
        self.tau_target = tau
        self.tau_input = tau if cfg.temporal_encoding_enabled else np.zeros_like(tau)

        agg_node, agg_other, agg_edge = [], [], []
        for u in range(n):
            for idx in g.adjacency[u]:
                e = g.edges[idx]
                agg_node.append(u)
                agg_other.append(e.dst if e.src == u else e.src)
                agg_edge.append(idx)
        self.agg_node = np.array(agg_node, dtype=np.int64)
        self.agg_other = np.array(agg_other, dtype=np.int64)
        self.agg_edge = np.array(agg_edge, dtype=np.int64)
        deg = np.zeros(n, dtype=np.float64)
        for u in agg_node:
            deg[u] += 1.0
        self.deg = deg
        self.deg_safe = np.maximum(deg, 1.0)


class _TeacherCtx:
    """Per-node prefix sums of neighbor-prompt embeddings, time-ordered, so
    a leakage-guarded neighborhood sum is one binary search plus a lookup."""

    def __init__(self, g: DyTag, llm: EmbeddingProvider, workers: int):
        self.g = g
        self.llm = llm
        self.nb_vec = np.stack(
            [llm.embed(neighbor_prompt(g, e)) for e in g.edges]
        ) if g.edges else np.zeros((0, llm.dim))

        def node_prefix(u: int):
            idxs = g.adjacency[u]  # already ascending = time-ordered
            times = [g.edges[i].timestamp for i in idxs]
            prefix = np.zeros((len(idxs) + 1, llm.dim))
            if idxs:
                prefix[1:] = np.cumsum(self.nb_vec[idxs], axis=0)
            return times, prefix

        built = _parallel_map(node_prefix, list(range(g.node_count)), workers)
        self.times = [t for t, _ in built]
        self.prefix = [p for _, p in built]

    def nbr_sum(self, u: int, before_time: int | None) -> np.ndarray:
        if before_time is None:
            return self.prefix[u][-1]
        cnt = bisect.bisect_left(self.times[u], before_time)
        return self.prefix[u][cnt]


# ---------------------------------------------------------------------------
# student forward/backward over the whole graph


class _GraphTape:
    __slots__ = ("tape_nodes", "tape_rels", "h_uv", "h_hat", "layers", "h_final")


def _forward_graph(ws: _Workspace, model: StudentModel) -> _GraphTape:
    t = _GraphTape()
    h_nodes, t.tape_nodes = mlp_forward(model.node_mlp, ws.enc_nodes)
    h_rels, t.tape_rels = mlp_forward(model.node_mlp, ws.enc_rels)
    t.h_uv = h_rels[ws.rel_rows] if len(ws.rel_rows) else np.zeros((0, h_nodes.shape[1]))
    t.h_hat = np.concatenate([t.h_uv, ws.tau_input], axis=1)

    h = h_nodes
    t.layers = []
    for mp in model.passing:
        msg_in = np.concatenate([h[ws.agg_other], t.h_hat[ws.agg_edge]], axis=1)
        z_msg = msg_in @ mp.w_msg.T + mp.b_msg
        msgs = np.maximum(z_msg, 0.0)
        total = np.zeros_like(h)
        np.add.at(total, ws.agg_node, msgs)
        mean = total / ws.deg_safe[:, None]
        upd_in = np.concatenate([h, mean], axis=1)
        z_upd = upd_in @ mp.w_upd.T + mp.b_upd
        t.layers.append((h, msg_in, z_msg, upd_in, z_upd))
        h = np.maximum(z_upd, 0.0)
    t.h_final = h
    return t


def _backward_graph(
    ws: _Workspace, model: StudentModel, t: _GraphTape, g_final: np.ndarray
) -> ParamDict:
    """Backprop from a gradient on the final node states down to every
    student parameter. Frozen embedding inputs absorb nothing."""
    d = g_final.shape[1]
    grads: ParamDict = {}
    g_h = g_final
    g_hat = np.zeros_like(t.h_hat)
    for li in range(len(model.passing) - 1, -1, -1):
        mp = model.passing[li]
        h_in, msg_in, z_msg, upd_in, z_upd = t.layers[li]
        gz_upd = g_h * relu_grad(z_upd)
        grads[f"mp{li}.w_upd"] = gz_upd.T @ upd_in
        grads[f"mp{li}.b_upd"] = gz_upd.sum(axis=0)
        g_upd_in = gz_upd @ mp.w_upd
        g_h_prev = g_upd_in[:, :d].copy()
        g_mean = g_upd_in[:, d:]
        g_msgs = g_mean[ws.agg_node] / ws.deg_safe[ws.agg_node][:, None]
        gz_msg = g_msgs * relu_grad(z_msg)
        grads[f"mp{li}.w_msg"] = gz_msg.T @ msg_in
        grads[f"mp{li}.b_msg"] = gz_msg.sum(axis=0)
        g_msg_in = gz_msg @ mp.w_msg
        np.add.at(g_h_prev, ws.agg_other, g_msg_in[:, :d])
        np.add.at(g_hat, ws.agg_edge, g_msg_in[:, d:])
        g_h = g_h_prev

    g_uv = g_hat[:, :d]  # temporal-encoding columns are frozen input
    _, node_grads = mlp_backward(model.node_mlp, t.tape_nodes, g_h, "node_mlp")
    g_rel_rows = np.zeros((ws.enc_rels.shape[0], d))
    np.add.at(g_rel_rows, ws.rel_rows, g_uv)
    _, rel_grads = mlp_backward(model.node_mlp, t.tape_rels, g_rel_rows, "node_mlp")
    for k in node_grads:
        grads[k] = node_grads[k] + rel_grads[k]
    return grads


# ---------------------------------------------------------------------------
# distillation pieces (vectorized over batch rows)


def _rows_normalize(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    s = np.linalg.norm(x, axis=1)
    return x / (s + NORM_EPS)[:, None], s


def _rows_normalize_vjp(x: np.ndarray, s: np.ndarray, g: np.ndarray) -> np.ndarray:
    out = g / (s + NORM_EPS)[:, None]
    nz = s > 0
    coef = np.zeros_like(s)
    coef[nz] = np.einsum("ij,ij->i", x[nz], g[nz]) / (s[nz] * (s[nz] + NORM_EPS) ** 2)
    return out - x * coef[:, None]


def kd_loss_batch(
    h_st: np.ndarray, h_tx: np.ndarray
) -> tuple[float, np.ndarray, np.ndarray]:
    """Row-wise exp(-cosine) averaged over the batch, with gradients for
    both stacks of vectors."""
    an, sa = _rows_normalize(h_st)
    bn, sb = _rows_normalize(h_tx)
    cos = np.einsum("ij,ij->i", an, bn)
    per_row = np.exp(-cos)
    loss = float(per_row.mean())
    dc = -per_row / per_row.size
    g_an = dc[:, None] * bn
    g_bn = dc[:, None] * an
    return loss, _rows_normalize_vjp(h_st, sa, g_an), _rows_normalize_vjp(h_tx, sb, g_bn)


def _teacher_batch(
    ws: _Workspace,
    model: StudentModel,
    tc: _TeacherCtx,
    edges: list[TemporalEdge],
    edge_idx: list[int | None],
    positive: list[bool],
) -> tuple[np.ndarray, list]:
    """Teacher representations for a batch of (possibly fake) edges:
    project both neighborhood sums and the existence-prompt vector through
    the teacher MLP and add the three. Returns (B, d_teacher) and a tape."""
    g, cfg = ws.g, ws.cfg
    guard = cfg.leakage_guard
    rows = np.zeros((len(edges), 3, tc.llm.dim))
    for b, e in enumerate(edges):
        before = e.timestamp if guard else None
        su = tc.nbr_sum(e.src, before)
        sv = tc.nbr_sum(e.dst, before)
        if guard and cfg.teacher_include_focal_edge and edge_idx[b] is not None:
            su = su + tc.nb_vec[edge_idx[b]]
            sv = sv + tc.nb_vec[edge_idx[b]]
        rows[b, 0] = su
        rows[b, 1] = sv
        rows[b, 2] = tc.llm.embed(link_prompt(g, e, positive[b]))
    flat = rows.reshape(len(edges) * 3, tc.llm.dim)
    out, tape = mlp_forward(model.teacher_mlp, flat)
    h_tx = out.reshape(len(edges), 3, -1).sum(axis=1)
    return h_tx, tape


def _teacher_backward(
    model: StudentModel, tape: list, g_tx: np.ndarray
) -> ParamDict:
    g_flat = np.repeat(g_tx, 3, axis=0)
    _, grads = mlp_backward(model.teacher_mlp, tape, g_flat, "teacher_mlp")
    return grads


# ---------------------------------------------------------------------------
# one optimization step


def _merge_grads(total: ParamDict, part: ParamDict) -> None:
    for k, v in part.items():
        total[k] = total[k] + v if k in total else v


def _hadamard_pairs(
    t: _GraphTape, src: np.ndarray, dst: np.ndarray
) -> np.ndarray:
    return t.h_final[src] * t.h_final[dst]


def _hadamard_backward(
    t: _GraphTape, src: np.ndarray, dst: np.ndarray, g_hst: np.ndarray
) -> np.ndarray:
    g_final = np.zeros_like(t.h_final)
    np.add.at(g_final, src, g_hst * t.h_final[dst])
    np.add.at(g_final, dst, g_hst * t.h_final[src])
    return g_final


def _step(
    ws: _Workspace,
    model: StudentModel,
    tc: _TeacherCtx | None,
    task: str,
    batch_edges: list[TemporalEdge],
    batch_idx: list[int | None],
    batch_positive: list[bool],
) -> tuple[dict[str, float], ParamDict]:
    """Forward and backward for one batch; returns the unweighted loss
    components and the gradients of the lambda-weighted total."""
    cfg = ws.cfg
    t = _forward_graph(ws, model)
    src = np.array([e.src for e in batch_edges], dtype=np.int64)
    dst = np.array([e.dst for e in batch_edges], dtype=np.int64)
    h_st = _hadamard_pairs(t, src, dst)

    grads: ParamDict = {}
    parts = {"flp": 0.0, "ec": 0.0, "kd": 0.0}
    g_hst = np.zeros_like(h_st)

    if task == "flp":
        target = np.zeros((len(batch_edges), ws.length))
        mask = np.ones_like(target, dtype=bool)
        for b, idx in enumerate(batch_idx):
            if idx is not None:
                target[b] = ws.tau_target[idx]
                mask[b] = ws.tau_target[idx] != -1.0
        logits, head_tape = mlp_forward(model.flp_head, h_st)
        pred = sigmoid(logits)
        parts["flp"] = bce_masked(pred, target, mask)
        g_logits = cfg.lambda_flp * bce_masked_grad_logits(pred, target, mask)
        g_in, head_grads = mlp_backward(model.flp_head, head_tape, g_logits, "flp_head")
        _merge_grads(grads, head_grads)
        g_hst += g_in
    else:
        labels = np.array([e.label for e in batch_edges], dtype=np.int64)
        logits, head_tape = mlp_forward(model.ec_head, h_st)
        parts["ec"], g_logits = softmax_xent(logits, labels)
        g_in, head_grads = mlp_backward(
            model.ec_head, head_tape, cfg.lambda_ec * g_logits, "ec_head"
        )
        _merge_grads(grads, head_grads)
        g_hst += g_in

    if cfg.effective_lambda_kd > 0.0:
        assert tc is not None
        h_tx, teacher_tape = _teacher_batch(
            ws, model, tc, batch_edges, batch_idx, batch_positive
        )
        parts["kd"], g_st, g_tx = kd_loss_batch(h_st, h_tx)
        g_hst += cfg.effective_lambda_kd * g_st
        _merge_grads(
            grads,
            _teacher_backward(model, teacher_tape, cfg.effective_lambda_kd * g_tx),
        )

    g_final = _hadamard_backward(t, src, dst, g_hst)
    _merge_grads(grads, _backward_graph(ws, model, t, g_final))
    return parts, grads


def step_loss_and_grads(
    g: DyTag,
    cfg: TrainConfig,
    model: StudentModel,
    enc: EmbeddingProvider,
    llm: EmbeddingProvider,
    task: str,
    batch_edges: list[TemporalEdge],
    batch_idx: list[int | None],
    batch_positive: list[bool],
) -> tuple[float, ParamDict]:
    """Single-batch composite loss and gradients, for verification: the
    returned scalar is the lambda-weighted total the gradients belong to."""
    ws = _Workspace(g, cfg, enc)
    tc = _TeacherCtx(g, llm, cfg.workers) if cfg.effective_lambda_kd > 0 else None
    parts, grads = _step(ws, model, tc, task, batch_edges, batch_idx, batch_positive)
    total = (
        cfg.lambda_flp * parts["flp"]
        + cfg.lambda_ec * parts["ec"]
        + cfg.effective_lambda_kd * parts["kd"]
    )
    return total, grads


# ---------------------------------------------------------------------------
# training loops


def _shuffle_seed(seed: int, epoch: int) -> int:
    return seed * _SHUFFLE_MULT + _SHUFFLE_OFFSET + epoch


def _eval_neg_seed(seed: int, split_idx: int, setting_idx: int) -> int:
    return seed + _EVAL_SEED_OFFSET + 10 * split_idx + setting_idx


def epoch_negatives(
    g: DyTag, train_idx: list[int], cfg: TrainConfig, epoch: int
) -> list[TemporalEdge]:
    """The fake edges paired with the training positives for one epoch.
    Exposed so external tools can enumerate exactly the prompts a file
    provider must contain."""
    return sample_negative_edges(g, train_idx, cfg.seed + epoch)


def _batches(order: list[int], size: int):
    for i in range(0, len(order), size):
        yield order[i : i + size]


@dataclass
class EvalReport:
    task: str
    dataset: dict
    seed: int
    provider: str
    config: dict
    initial_loss: dict
    loss_curve: list[dict]
    metrics: dict
    notes: list[str]

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "dataset": self.dataset,
            "seed": self.seed,
            "provider": self.provider,
            "config": self.config,
            "initial_loss": self.initial_loss,
            "loss_curve": self.loss_curve,
            "metrics": self.metrics,
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def _flatten_for_csv(value, prefix: str, rows: list[tuple[str, str]]) -> None:
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten_for_csv(value[k], f"{prefix}.{k}" if prefix else str(k), rows)
    elif isinstance(value, (list, tuple)):
        for i, v in enumerate(value):
            _flatten_for_csv(v, f"{prefix}.{i}", rows)
    else:
        rows.append((prefix, json.dumps(value)))


def report_csv(report: EvalReport) -> str:
    rows: list[tuple[str, str]] = []
    _flatten_for_csv(report.to_dict(), "", rows)
    return "key,value\n" + "".join(f"{k},{v}\n" for k, v in rows)


def report_paths(out_dir: str | Path, report: EvalReport) -> tuple[Path, Path]:
    stem = f"report_{report.dataset['name']}_{report.task}_s{report.seed}"
    out = Path(out_dir)
    return out / f"{stem}.json", out / f"{stem}.csv"


def write_report(report: EvalReport, out_dir: str | Path) -> tuple[Path, Path]:
    json_path, csv_path = report_paths(out_dir, report)
    json_path.parent.mkdir(parents=True, exist_ok=True)
    json_path.write_text(report.to_json(), encoding="utf-8")
    csv_path.write_text(report_csv(report), encoding="utf-8")
    return json_path, csv_path


def _score_flp(
    ws: _Workspace, t: _GraphTape, model: StudentModel, edges: list[TemporalEdge]
) -> np.ndarray:
    """Probability that each candidate edge exists at its own timestamp:
    the predicted temporal encoding evaluated at position t."""
    if not edges:
        return np.zeros(0)
    src = np.array([e.src for e in edges], dtype=np.int64)
    dst = np.array([e.dst for e in edges], dtype=np.int64)
    logits, _ = mlp_forward(model.flp_head, _hadamard_pairs(t, src, dst))
    pred = sigmoid(logits)
    times = np.array([e.timestamp for e in edges], dtype=np.int64)
    return pred[np.arange(len(edges)), times]


def _eval_flp_split(
    ws: _Workspace,
    t: _GraphTape,
    model: StudentModel,
    pos_idx: list[int],
    neg_seed: int,
    workers: int,
) -> dict:
    if not pos_idx:
        raise EmptyEvalSet("no positive edges to evaluate")
    g = ws.g
    pos_edges = [g.edges[i] for i in pos_idx]
    neg_edges = sample_negative_edges(g, pos_idx, neg_seed)
    edges = pos_edges + neg_edges

    chunks = [edges[i : i + 512] for i in range(0, len(edges), 512)]
    scores = np.concatenate(
        _parallel_map(lambda c: _score_flp(ws, t, model, c), chunks, workers)
    )
    labels = np.concatenate(
        [np.ones(len(pos_edges), dtype=np.int64), np.zeros(len(neg_edges), dtype=np.int64)]
    )
    return {
        "roc_auc": roc_auc(scores, labels),
        "average_precision": average_precision(scores, labels),
        "num_pos": len(pos_edges),
        "num_neg": len(neg_edges),
    }


def _eval_ec_split(
    ws: _Workspace, t: _GraphTape, model: StudentModel, pos_idx: list[int]
) -> dict:
    if not pos_idx:
        raise EmptyEvalSet("no edges to evaluate")
    g = ws.g
    edges = [g.edges[i] for i in pos_idx]
    src = np.array([e.src for e in edges], dtype=np.int64)
    dst = np.array([e.dst for e in edges], dtype=np.int64)
    logits, _ = mlp_forward(model.ec_head, _hadamard_pairs(t, src, dst))
    pred = np.argmax(logits, axis=1)
    true = np.array([e.label for e in edges], dtype=np.int64)
    scores = precision_recall_f1(true, pred, g.label_vocab.size)
    return {
        "accuracy": float(np.mean(pred == true)),
        "macro_precision": scores.macro.precision,
        "macro_recall": scores.macro.recall,
        "macro_f1": scores.macro.f1,
        "weighted_precision": scores.weighted.precision,
        "weighted_recall": scores.weighted.recall,
        "weighted_f1": scores.weighted.f1,
        "per_class_f1": [c.f1 for c in scores.per_class],
        "num_edges": len(edges),
    }


def run_experiment(
    g: DyTag,
    cfg: TrainConfig,
    task: str,
    enc: EmbeddingProvider,
    llm: EmbeddingProvider,
    dataset_name: str = "dataset",
    provider_label: str = "hash",
) -> tuple[EvalReport, ParamDict]:
    """Train on the chronological train split and evaluate on val/test,
    both transductive and (when any exist) edges with unseen endpoints.
    Returns the report and the final parameters."""
    if task not in TASKS:
        raise ConfigError(f"task must be one of {TASKS}, got {task!r}")
    if enc.dim != cfg.d_enc:
        raise ConfigError(f"text encoder dim {enc.dim} != d_enc {cfg.d_enc}")
    if llm.dim != cfg.d_llm:
        raise ConfigError(f"prompt embedding dim {llm.dim} != d_llm {cfg.d_llm}")

    ws = _Workspace(g, cfg, enc)
    need_teacher = cfg.effective_lambda_kd > 0.0
    tc = _TeacherCtx(g, llm, cfg.workers) if need_teacher else None
    model = init_model(cfg, ws.length, g.label_vocab.size)
    params = model.to_params()
    adam = init_adam(params)

    train_idx, val_idx, test_idx = chronological_split(g, cfg.split)
    notes: list[str] = []
    loss_curve: list[dict] = []

    def run_epoch(epoch: int, params, adam, update: bool):
        """One pass over the train split; with update=False this only
        measures the loss (used for the pre-training baseline)."""
        negs: list[TemporalEdge] = []
        if task == "flp":
            negs = epoch_negatives(g, train_idx, cfg, max(epoch, 0))
        order = list(range(len(train_idx)))
        if update:
            random.Random(_shuffle_seed(cfg.seed, epoch)).shuffle(order)

        sums = {"flp": 0.0, "ec": 0.0, "kd": 0.0}
        rows = 0
        for batch in _batches(order, cfg.batch_size):
            model_now = model.with_params(params)
            edges: list[TemporalEdge] = []
            idxs: list[int | None] = []
            positive: list[bool] = []
            for p in batch:
                edges.append(g.edges[train_idx[p]])
                idxs.append(train_idx[p])
                positive.append(True)
            if task == "flp":
                for p in batch:
                    edges.append(negs[p])
                    idxs.append(None)
                    positive.append(False)
            parts, grads = _step(ws, model_now, tc, task, edges, idxs, positive)
            if update:
                params, adam = adam_step(adam, params, grads, cfg.learning_rate)
            for k in sums:
                sums[k] += parts[k] * len(edges)
            rows += len(edges)

        avg = {k: (v / rows if rows else 0.0) for k, v in sums.items()}
        avg["total"] = (
            cfg.lambda_flp * avg["flp"]
            + cfg.lambda_ec * avg["ec"]
            + cfg.effective_lambda_kd * avg["kd"]
        )
        return params, adam, avg

    _, _, initial = run_epoch(0, params, adam, update=False)
    initial_loss = {"total": initial["total"], "flp": initial["flp"],
                    "ec": initial["ec"], "kd": initial["kd"]}

    for epoch in range(cfg.epochs):
        params, adam, avg = run_epoch(epoch, params, adam, update=True)
        loss_curve.append(
            {"epoch": epoch, "total": avg["total"], "flp": avg["flp"],
             "ec": avg["ec"], "kd": avg["kd"]}
        )

    model = model.with_params(params)
    t = _forward_graph(ws, model)

    metrics: dict = {}
    for split_idx, (split_name, pos_idx) in enumerate(
        (("val", val_idx), ("test", test_idx))
    ):
        entry: dict = {}
        inductive_idx = inductive_test_filter(g, pos_idx, train_idx)
        for setting_idx, (setting, subset) in enumerate(
            (("transductive", pos_idx), ("inductive", inductive_idx))
        ):
            try:
                if task == "flp":
                    entry[setting] = _eval_flp_split(
                        ws, t, model, subset,
                        _eval_neg_seed(cfg.seed, split_idx, setting_idx), cfg.workers,
                    )
                else:
                    entry[setting] = _eval_ec_split(ws, t, model, subset)
            except EmptyEvalSet:
                entry[setting] = None
                notes.append(f"{split_name}.{setting}: empty evaluation set")
        metrics[split_name] = entry

    report = EvalReport(
        task=task,
        dataset={
            "name": dataset_name,
            "nodes": g.node_count,
            "edges": g.num_edges,
            "T": g.time_horizon.T,
            "k": g.time_horizon.k,
            "num_labels": g.label_vocab.size,
        },
        seed=cfg.seed,
        provider=provider_label,
        config=asdict(cfg),
        initial_loss=initial_loss,
        loss_curve=loss_curve,
        metrics=metrics,
        notes=notes,
    )
    return report, params


def train_flp(g, cfg, enc, llm, dataset_name="dataset", provider_label="hash"):
    return run_experiment(g, cfg, "flp", enc, llm, dataset_name, provider_label)


def train_ec(g, cfg, enc, llm, dataset_name="dataset", provider_label="hash"):
    return run_experiment(g, cfg, "ec", enc, llm, dataset_name, provider_label)


LAMBDA_KD_SWEEP = (0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0)


def ablation_run(
    g: DyTag,
    cfg: TrainConfig,
    task: str,
    enc: EmbeddingProvider,
    llm: EmbeddingProvider,
    dataset_name: str = "dataset",
    provider_label: str = "hash",
) -> dict:
    """Sweep the distillation weight and toggle the two design features.

    Returns a JSON-ready dict: per-variant final test metrics plus the full
    loss curves, keyed by variant name.
    """
    def run(c: TrainConfig) -> dict:
        report, _ = run_experiment(g, c, task, enc, llm, dataset_name, provider_label)
        return {
            "config": {"lambda_kd": c.lambda_kd, "kd_enabled": c.kd_enabled,
                       "temporal_encoding_enabled": c.temporal_encoding_enabled},
            "initial_train_loss": report.initial_loss["total"],
            "final_train_loss": report.loss_curve[-1]["total"],
            "metrics": report.metrics,
        }

    out: dict = {"task": task, "dataset": dataset_name, "seed": cfg.seed}
    out["baseline"] = run(cfg)
    out["lambda_kd_sweep"] = {
        f"{lam:g}": run(replace(cfg, lambda_kd=lam)) for lam in LAMBDA_KD_SWEEP
    }
    out["kd_disabled"] = run(replace(cfg, kd_enabled=False))
    out["lambda_kd_zero"] = run(replace(cfg, lambda_kd=0.0))
    out["temporal_disabled"] = run(replace(cfg, temporal_encoding_enabled=False))
    return out
