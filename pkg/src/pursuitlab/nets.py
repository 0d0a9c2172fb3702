"""Dense networks with hand-written backprop, Adam, and checkpoint I/O.

Everything here is plain numpy so the gradients are auditable: analytic
gradients are verified against central finite differences in the test
suite. Networks are rectifier (ReLU) stacks with either a linear output
(critics) or a tanh output (actors, which must emit actions in [-1, 1]).

The optimizer is Adam with the standard semantics, written out so that any
implementation can reproduce it exactly: per-parameter first and second
moment accumulators

    m <- beta1 * m + (1 - beta1) * g
    v <- beta2 * v + (1 - beta2) * g * g

bias-corrected as m_hat = m / (1 - beta1^t), v_hat = v / (1 - beta2^t)
(t counts optimizer steps from 1), and the update

    p <- p - lr * m_hat / (sqrt(v_hat) + eps).

Checkpoint format (documented, language-neutral): an ASCII header of lines

    pursuitlab-checkpoint v1
    meta <key> <value>          (zero or more)
    network <name> <activation> <size0> <size1> ... <sizeL>
    data

followed by raw little-endian IEEE-754 64-bit floats: for each declared
network in order, for each layer, the weight matrix W (shape in x out,
row-major) then the bias vector b.
"""

from __future__ import annotations

import io
from typing import Iterable, Optional

import numpy as np

ACTIVATIONS = ("linear", "tanh")


class DenseNetwork:
    """Fully connected ReLU network with a linear or tanh output head.

    Weights are initialized uniformly in [-1/sqrt(fan_in), 1/sqrt(fan_in)]
    per layer (biases too). ``forward`` alone is enough for inference;
    ``forward_cached`` + ``backward`` give exact parameter and input
    gradients for training.
    """

    def __init__(
        self,
        sizes: Iterable[int],
        output_activation: str = "linear",
        rng: Optional[np.random.Generator] = None,
        dtype=np.float64,
    ):
        self.sizes = tuple(int(s) for s in sizes)
        if len(self.sizes) < 2:
            raise ValueError("need at least an input and an output size")
        if output_activation not in ACTIVATIONS:
            raise ValueError(f"unknown output activation {output_activation!r}")
        self.output_activation = output_activation
        self.dtype = np.dtype(dtype)
        rng = rng or np.random.default_rng()
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(self.sizes, self.sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            self.weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)).astype(self.dtype))
            self.biases.append(rng.uniform(-bound, bound, size=fan_out).astype(self.dtype))

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def forward(self, x: np.ndarray) -> np.ndarray:
        h = x
        last = self.n_layers - 1
        for li, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w + b
            if li < last:
                np.maximum(h, 0.0, out=h)
            elif self.output_activation == "tanh":
                np.tanh(h, out=h)
        return h

    def forward_cached(self, x: np.ndarray):
        """Forward pass keeping every layer's activation for backprop."""
        acts = [x]
        h = x
        last = self.n_layers - 1
        for li, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w + b
            if li < last:
                np.maximum(h, 0.0, out=h)
            elif self.output_activation == "tanh":
                np.tanh(h, out=h)
            acts.append(h)
        return h, acts

    def backward(self, acts: list[np.ndarray], grad_out: np.ndarray):
        """Backpropagate ``grad_out`` (dLoss/dOutput) through the cache.

        Returns (weight_grads, bias_grads, grad_input). ReLU gradients use
        the post-activation sign; the tanh head uses 1 - y^2.
        """
        g = grad_out
        if self.output_activation == "tanh":
            g = g * (1.0 - acts[-1] ** 2)
        w_grads = [None] * self.n_layers
        b_grads = [None] * self.n_layers
        for li in range(self.n_layers - 1, -1, -1):
            w_grads[li] = acts[li].T @ g
            b_grads[li] = g.sum(axis=0)
            g = g @ self.weights[li].T
            if li > 0:
                g = g * (acts[li] > 0.0)
        return w_grads, b_grads, g

    def copy(self) -> "DenseNetwork":
        clone = DenseNetwork.__new__(DenseNetwork)
        clone.sizes = self.sizes
        clone.output_activation = self.output_activation
        clone.dtype = self.dtype
        clone.weights = [w.copy() for w in self.weights]
        clone.biases = [b.copy() for b in self.biases]
        return clone

    def soft_update_from(self, online: "DenseNetwork", tau: float) -> None:
        """Polyak averaging: params <- tau * online + (1 - tau) * params."""
        for mine, theirs in zip(self.weights, online.weights):
            mine *= 1.0 - tau
            mine += tau * theirs
        for mine, theirs in zip(self.biases, online.biases):
            mine *= 1.0 - tau
            mine += tau * theirs

    # flat views used by the finite-difference tests and checkpointing
    def parameters(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out


class Adam:
    """Adam over a fixed list of parameter arrays (updated in place)."""

    def __init__(self, params: list[np.ndarray], lr: float = 3e-4,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, grads: list[np.ndarray]) -> None:
        self.t += 1
        b1c = 1.0 - self.beta1**self.t
        b2c = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            p -= self.lr * (m / b1c) / (np.sqrt(v / b2c) + self.eps)


# --------------------------------------------------------------------------
# checkpoint I/O

MAGIC = "pursuitlab-checkpoint v1"


def save_checkpoint(path, networks: dict[str, DenseNetwork], meta: Optional[dict] = None) -> None:
    """Write named networks plus metadata in the documented format."""
    header = io.StringIO()
    header.write(MAGIC + "\n")
    for key, value in (meta or {}).items():
        header.write(f"meta {key} {value}\n")
    for name, net in networks.items():
        sizes = " ".join(str(s) for s in net.sizes)
        header.write(f"network {name} {net.output_activation} {sizes}\n")
    header.write("data\n")

    with open(path, "wb") as fh:
        fh.write(header.getvalue().encode("ascii"))
        for net in networks.values():
            for w, b in zip(net.weights, net.biases):
                fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
                fh.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def load_checkpoint(path) -> tuple[dict[str, DenseNetwork], dict[str, str]]:
    """Read networks and metadata written by ``save_checkpoint``."""
    with open(path, "rb") as fh:
        blob = fh.read()

    newline = blob.index(b"\n")
    if blob[:newline].decode("ascii", errors="replace") != MAGIC:
        raise ValueError(f"{path} is not a pursuitlab checkpoint")

    meta: dict[str, str] = {}
    declared: list[tuple[str, str, tuple[int, ...]]] = []
    pos = newline + 1
    while True:
        end = blob.index(b"\n", pos)
        line = blob[pos:end].decode("ascii")
        pos = end + 1
        if line == "data":
            break
        kind, rest = line.split(" ", 1)
        if kind == "meta":
            key, value = rest.split(" ", 1)
            meta[key] = value
        elif kind == "network":
            parts = rest.split(" ")
            declared.append((parts[0], parts[1], tuple(int(s) for s in parts[2:])))
        else:
            raise ValueError(f"unexpected checkpoint header line: {line!r}")

    networks: dict[str, DenseNetwork] = {}
    for name, activation, sizes in declared:
        net = DenseNetwork.__new__(DenseNetwork)
        net.sizes = sizes
        net.output_activation = activation
        net.dtype = np.dtype(np.float64)
        net.weights = []
        net.biases = []
        for fan_in, fan_out in zip(sizes, sizes[1:]):
            n = fan_in * fan_out
            w = np.frombuffer(blob, dtype="<f8", count=n, offset=pos).reshape(fan_in, fan_out)
            pos += n * 8
            b = np.frombuffer(blob, dtype="<f8", count=fan_out, offset=pos)
            pos += fan_out * 8
            net.weights.append(w.copy())
            net.biases.append(b.copy())
        networks[name] = net
    if pos != len(blob):
        raise ValueError(f"{path}: {len(blob) - pos} trailing bytes after declared weights")
    return networks, meta
