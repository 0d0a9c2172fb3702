"""Dense network forward/backward correctness, Adam, checkpoint round trips."""

import numpy as np
import pytest
from _gradcheck import (
    actor_loss_and_grads,
    critic_loss_and_grads,
    finite_difference_grad,
    relative_error,
)

from pursuitlab.nets import Adam, DenseNetwork, load_checkpoint, save_checkpoint


def test_zero_weights_give_zero_output():
    net = DenseNetwork([4, 8, 1], rng=np.random.default_rng(0))
    for w in net.weights:
        w[:] = 0.0
    for b in net.biases:
        b[:] = 0.0
    x = np.random.default_rng(1).standard_normal((5, 4))
    assert np.all(net.forward(x) == 0.0)
    tanh_net = DenseNetwork([4, 8, 1], output_activation="tanh", rng=np.random.default_rng(0))
    for w in tanh_net.weights:
        w[:] = 0.0
    for b in tanh_net.biases:
        b[:] = 0.0
    assert np.all(tanh_net.forward(x) == 0.0)


def test_single_layer_matches_affine_map():
    # a one-layer linear network is exactly x @ W + b
    rng = np.random.default_rng(2)
    net = DenseNetwork([3, 2], rng=rng)
    x = rng.standard_normal((7, 3))
    assert np.allclose(net.forward(x), x @ net.weights[0] + net.biases[0], atol=1e-15)


def test_tanh_output_bounded():
    rng = np.random.default_rng(3)
    net = DenseNetwork([6, 32, 2], output_activation="tanh", rng=rng)
    y = net.forward(rng.standard_normal((100, 6)) * 50)
    assert np.all(np.abs(y) <= 1.0)


def test_init_is_fan_in_uniform_and_seeded():
    a = DenseNetwork([10, 20, 1], rng=np.random.default_rng(42))
    b = DenseNetwork([10, 20, 1], rng=np.random.default_rng(42))
    for wa, wb in zip(a.weights, b.weights):
        assert np.array_equal(wa, wb)
    bound0 = 1.0 / np.sqrt(10)
    assert np.max(np.abs(a.weights[0])) <= bound0
    assert np.max(np.abs(a.biases[0])) <= bound0


def test_critic_gradients_match_finite_differences():
    rng = np.random.default_rng(4)
    critic = DenseNetwork([5, 8, 6, 1], rng=rng)
    x = rng.standard_normal((9, 5))
    y = rng.standard_normal((9, 1))

    loss, w_grads, b_grads, grad_in = critic_loss_and_grads(critic, x, y)

    def loss_fn():
        return float(np.mean((critic.forward(x) - y) ** 2))

    assert loss == pytest.approx(loss_fn())
    for li in range(critic.n_layers):
        num_w = finite_difference_grad(loss_fn, critic.weights[li])
        num_b = finite_difference_grad(loss_fn, critic.biases[li])
        assert relative_error(w_grads[li], num_w) < 1e-7
        assert relative_error(b_grads[li], num_b) < 1e-7
    num_in = finite_difference_grad(loss_fn, x)
    assert relative_error(grad_in, num_in) < 1e-7


def test_actor_gradients_match_finite_differences():
    rng = np.random.default_rng(5)
    actor = DenseNetwork([4, 7, 2], output_activation="tanh", rng=rng)
    critic = DenseNetwork([6, 9, 1], rng=rng)
    states = rng.standard_normal((8, 4))

    loss, w_grads, b_grads = actor_loss_and_grads(actor, critic, states)

    def loss_fn():
        a = actor.forward(states)
        return -float(np.mean(critic.forward(np.concatenate([states, a], axis=1))))

    assert loss == pytest.approx(loss_fn())
    for li in range(actor.n_layers):
        num_w = finite_difference_grad(loss_fn, actor.weights[li])
        num_b = finite_difference_grad(loss_fn, actor.biases[li])
        assert relative_error(w_grads[li], num_w) < 1e-7
        assert relative_error(b_grads[li], num_b) < 1e-7


def test_adam_descends_quadratic():
    # minimize |p - target|^2; Adam must reduce the loss monotonically-ish
    target = np.array([1.0, -2.0, 0.5])
    p = np.zeros(3)
    opt = Adam([p], lr=0.05)
    losses = []
    for _ in range(400):
        grad = 2.0 * (p - target)
        opt.step([grad])
        losses.append(float(np.sum((p - target) ** 2)))
    assert losses[-1] < 1e-3
    assert losses[-1] < losses[0]


def test_adam_bias_correction_first_step():
    # with bias correction, the very first step has magnitude ~lr regardless
    # of gradient scale (up to the eps regularizer in the denominator)
    for scale in (1e-3, 1.0, 1e3):
        p = np.array([0.0])
        opt = Adam([p], lr=0.01)
        opt.step([np.array([scale])])
        assert p[0] == pytest.approx(-0.01, rel=1e-4)


def test_soft_update_convex_combination():
    rng = np.random.default_rng(6)
    online = DenseNetwork([3, 4, 1], rng=rng)
    target = DenseNetwork([3, 4, 1], rng=rng)
    before = [w.copy() for w in target.weights]
    tau = 0.25
    target.soft_update_from(online, tau)
    for w_t, w_old, w_on in zip(target.weights, before, online.weights):
        assert np.allclose(w_t, tau * w_on + (1 - tau) * w_old, atol=1e-15)


def test_soft_update_tau_one_copies_online():
    rng = np.random.default_rng(7)
    online = DenseNetwork([3, 4, 1], rng=rng)
    target = DenseNetwork([3, 4, 1], rng=rng)
    target.soft_update_from(online, 1.0)
    for w_t, w_on in zip(target.weights, online.weights):
        assert np.array_equal(w_t, w_on)


def test_copy_is_deep_and_exact():
    net = DenseNetwork([4, 5, 2], output_activation="tanh", rng=np.random.default_rng(8))
    clone = net.copy()
    for a, b in zip(net.weights, clone.weights):
        assert np.array_equal(a, b)
    clone.weights[0][0, 0] += 1.0
    assert net.weights[0][0, 0] != clone.weights[0][0, 0]


def test_checkpoint_round_trip(tmp_path):
    rng = np.random.default_rng(9)
    actor = DenseNetwork([10, 16, 1], output_activation="tanh", rng=rng)
    critic = DenseNetwork([11, 16, 1], rng=rng)
    path = tmp_path / "policy.ckpt"
    save_checkpoint(path, {"actor": actor, "critic1": critic}, meta={"n_pursuers": 3, "note": "desk run"})
    nets, meta = load_checkpoint(path)
    assert meta["n_pursuers"] == "3"
    assert meta["note"] == "note desk run".split(" ", 1)[1]
    assert set(nets) == {"actor", "critic1"}
    assert nets["actor"].output_activation == "tanh"
    assert nets["actor"].sizes == (10, 16, 1)
    for loaded, orig in ((nets["actor"], actor), (nets["critic1"], critic)):
        for a, b in zip(loaded.parameters(), orig.parameters()):
            assert np.array_equal(a, b)


def test_checkpoint_rejects_foreign_file(tmp_path):
    path = tmp_path / "bogus.ckpt"
    path.write_bytes(b"not a checkpoint\njunk")
    with pytest.raises(ValueError):
        load_checkpoint(path)


def test_bad_sizes_rejected():
    with pytest.raises(ValueError):
        DenseNetwork([5])
    with pytest.raises(ValueError):
        DenseNetwork([5, 3], output_activation="sigmoid")
