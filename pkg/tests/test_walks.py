import numpy as np
import pytest

from walk2vec import (
    delta_distribution,
    distance_matrix,
    ego_uniform_distribution,
    feature_dim,
    from_edge_list,
    landmark_keys_unique,
    node_walk_features,
    pagerank,
    permute,
    select_degree_landmarks,
    similarity_matrix,
    stationary_distribution,
    transition_step,
    walk_feature,
    walk_trajectory,
)

from conftest import (
    dense_distance_matrix,
    dense_similarity_matrix,
    dense_trajectory,
    random_graph_min_degree,
    random_permutation,
)


class TestTransitionStep:
    def test_k2_forced_move(self, k2):
        assert np.allclose(transition_step(k2, [1.0, 0.0]), [0.0, 1.0])

    def test_regular_uniform_fixed_point(self, cycle4):
        p = np.full(4, 0.25)
        assert np.allclose(transition_step(cycle4, p), p, atol=1e-15)

    def test_path_split(self, path3):
        assert np.allclose(transition_step(path3, [0.0, 1.0, 0.0]), [0.5, 0.0, 0.5])

    def test_mass_conserved(self, rng):
        g = random_graph_min_degree(25, 0.2, rng)
        p = rng.random(25)
        p /= p.sum()
        assert abs(transition_step(g, p).sum() - 1.0) <= 1e-12

    def test_isolated_node_rejected(self):
        g = from_edge_list(3, [(0, 1)])
        with pytest.raises(ValueError):
            transition_step(g, [0.5, 0.5, 0.0])

    def test_invalid_distribution_rejected(self, k2):
        with pytest.raises(ValueError):
            transition_step(k2, [0.7, 0.7])
        with pytest.raises(ValueError):
            transition_step(k2, [1.5, -0.5])


class TestWalkTrajectory:
    def test_tau_one(self, path3):
        p0 = np.array([0.0, 1.0, 0.0])
        traj = walk_trajectory(path3, p0, 1)
        assert traj.steps.shape == (2, 3)
        assert np.allclose(traj.steps[0], p0)
        assert np.allclose(traj.steps[1], transition_step(path3, p0))

    def test_k2_bipartite_oscillation(self, k2):
        traj = walk_trajectory(k2, [1.0, 0.0], 3)
        expected = [[1, 0], [0, 1], [1, 0], [0, 1]]
        assert np.allclose(traj.steps, expected)

    def test_matches_dense_matrix_power(self, rng):
        g = random_graph_min_degree(15, 0.4, rng)
        p0 = np.full(15, 1 / 15)
        traj = walk_trajectory(g, p0, 15)
        oracle = dense_trajectory(g, p0, 15)
        assert np.abs(traj.steps - oracle).max() <= 1e-10

    def test_mass_conservation_along_walk(self, rng):
        g = random_graph_min_degree(30, 0.15, rng)
        traj = walk_trajectory(g, delta_distribution(30, 3), 20)
        assert np.abs(traj.steps.sum(axis=1) - 1.0).max() <= 1e-10

    def test_tau_zero_rejected(self, k2):
        with pytest.raises(ValueError):
            walk_trajectory(k2, [1.0, 0.0], 0)


class TestStationaryDistribution:
    def test_regular_uniform(self, cycle4):
        assert np.allclose(stationary_distribution(cycle4), 0.25)

    def test_star(self):
        g = from_edge_list(4, [(0, 1), (0, 2), (0, 3)])
        assert np.allclose(stationary_distribution(g), [3 / 6, 1 / 6, 1 / 6, 1 / 6])

    def test_path(self, path3):
        assert np.allclose(stationary_distribution(path3), [0.25, 0.5, 0.25])

    def test_walk_converges_to_stationary(self, rng):
        # connected non-bipartite graph: ||p_500 - omega||_1 <= 1e-6
        for _ in range(3):
            g = random_graph_min_degree(40, 0.15, rng)
            from walk2vec import is_connected, clustering_coefficients

            if not is_connected(g) or clustering_coefficients(g).max() == 0:
                continue
            traj = walk_trajectory(g, delta_distribution(40, 0), 500)
            omega = stationary_distribution(g)
            assert np.abs(traj.steps[-1] - omega).sum() <= 1e-6


class TestDistanceMatrix:
    def test_fixed_point_all_zero(self, cycle4):
        traj = walk_trajectory(cycle4, np.full(4, 0.25), 3)
        m = distance_matrix(traj, cycle4.degrees())
        assert np.allclose(m, 0.0)

    def test_k2_hand_value(self, k2):
        traj = walk_trajectory(k2, [1.0, 0.0], 1)
        m = distance_matrix(traj, k2.degrees())
        assert np.isclose(m[0, 1], np.sqrt(2.0))
        assert m[0, 0] == m[1, 1] == 0.0

    def test_matches_dense_oracle(self, rng):
        g = random_graph_min_degree(15, 0.4, rng)
        p0 = delta_distribution(15, 2)
        traj = walk_trajectory(g, p0, 5)
        m = distance_matrix(traj, g.degrees())
        oracle = dense_distance_matrix(dense_trajectory(g, p0, 5), g.degrees())
        assert np.abs(m - oracle).max() <= 1e-12
        assert np.allclose(m, m.T)


class TestSimilarityMatrix:
    def test_unit_diagonal(self, rng):
        g = random_graph_min_degree(12, 0.3, rng)
        traj = walk_trajectory(g, delta_distribution(12, 0), 4)
        s = similarity_matrix(traj, g.degrees())
        assert np.allclose(np.diag(s), 1.0)
        assert s.min() >= 0.0 and s.max() <= 1.0

    def test_disjoint_support_zero(self, k2):
        traj = walk_trajectory(k2, [1.0, 0.0], 1)
        s = similarity_matrix(traj, k2.degrees())
        assert s[0, 1] == 0.0

    def test_matches_dense_cosine_oracle(self, rng):
        g = random_graph_min_degree(15, 0.4, rng)
        p0 = np.full(15, 1 / 15)
        traj = walk_trajectory(g, p0, 5)
        s = similarity_matrix(traj, g.degrees())
        oracle = dense_similarity_matrix(dense_trajectory(g, p0, 5), g.degrees())
        assert np.abs(s - oracle).max() <= 1e-12


class TestWalkFeature:
    def test_length_formula(self, rng):
        g = random_graph_min_degree(20, 0.3, rng)
        assert len(walk_feature(g, np.full(20, 0.05), 15)) == 120
        assert feature_dim(15) == 120

    def test_regular_uniform_zero_vector(self, cycle4):
        f = walk_feature(cycle4, np.full(4, 0.25), 6)
        assert f.shape == (feature_dim(6),)
        assert np.allclose(f, 0.0)

    def test_k2_oscillation_values(self, k2):
        f = walk_feature(k2, [1.0, 0.0], 2)
        assert np.allclose(f, [np.sqrt(2.0), 0.0, np.sqrt(2.0)])

    def test_flattening_order_row_major(self, rng):
        g = random_graph_min_degree(10, 0.4, rng)
        p0 = delta_distribution(10, 0)
        traj = walk_trajectory(g, p0, 3)
        m = distance_matrix(traj, g.degrees())
        f = walk_feature(g, p0, 3)
        expected = [m[0, 1], m[0, 2], m[0, 3], m[1, 2], m[1, 3], m[2, 3]]
        assert np.allclose(f, expected)

    def test_similarity_metric_selectable(self, rng):
        g = random_graph_min_degree(10, 0.4, rng)
        f = walk_feature(g, delta_distribution(10, 1), 4, metric="similarity")
        assert f.shape == (feature_dim(4),)
        with pytest.raises(ValueError):
            walk_feature(g, delta_distribution(10, 1), 4, metric="kl")


class TestPermutationEquivariance:
    def test_trajectory_equivariance(self, rng):
        for _ in range(5):
            g = random_graph_min_degree(20, 0.25, rng)
            pi = random_permutation(20, rng)
            h = permute(g, pi)
            p0 = rng.random(20)
            p0 /= p0.sum()
            p0_pi = np.empty(20)
            p0_pi[pi] = p0
            tg = walk_trajectory(g, p0, 8).steps
            th = walk_trajectory(h, p0_pi, 8).steps
            assert np.abs(th[:, pi] - tg).max() <= 1e-10

    def test_distance_matrix_invariant(self, rng):
        for _ in range(5):
            g = random_graph_min_degree(20, 0.25, rng)
            pi = random_permutation(20, rng)
            h = permute(g, pi)
            p0 = rng.random(20)
            p0 /= p0.sum()
            p0_pi = np.empty(20)
            p0_pi[pi] = p0
            mg = distance_matrix(walk_trajectory(g, p0, 6), g.degrees())
            mh = distance_matrix(walk_trajectory(h, p0_pi, 6), h.degrees())
            assert np.abs(mg - mh).max() <= 1e-10


class TestNodeWalkFeatures:
    def test_matches_per_node_features(self, rng):
        g = random_graph_min_degree(18, 0.3, rng)
        batch = node_walk_features(g, 5)
        for i in range(g.n):
            single = walk_feature(g, delta_distribution(g.n, i), 5)
            assert np.abs(batch[i] - single).max() <= 1e-12

    def test_similarity_variant_matches(self, rng):
        g = random_graph_min_degree(12, 0.35, rng)
        batch = node_walk_features(g, 4, metric="similarity")
        for i in range(g.n):
            single = walk_feature(g, delta_distribution(g.n, i), 4, metric="similarity")
            assert np.abs(batch[i] - single).max() <= 1e-12

    def test_shape(self, rng):
        g = random_graph_min_degree(10, 0.4, rng)
        assert node_walk_features(g, 7).shape == (10, feature_dim(7))


class TestDegreeLandmarks:
    def test_star(self, star5):
        lm = select_degree_landmarks(star5)
        assert lm.max == 0
        assert lm.min in range(1, 5)
        assert lm.median in range(1, 5)

    def test_regular_full_tie_falls_back_to_node_zero(self):
        g = from_edge_list(6, [(i, (i + 1) % 6) for i in range(6)])
        lm = select_degree_landmarks(g)
        assert lm == (0, 0, 0, 0)
        assert not landmark_keys_unique(g)

    def test_matches_exhaustive_scan(self, rng):
        g = random_graph_min_degree(50, 0.2, rng)
        deg = g.degrees()
        pr = pagerank(g)

        def scan(cands, highest):
            best = max(cands, key=lambda i: pr[i]) if highest else min(
                cands, key=lambda i: pr[i]
            )
            tied = [i for i in cands if abs(pr[i] - pr[best]) <= 1e-9]
            return min(tied)

        dmax = [i for i in range(50) if deg[i] == deg.max()]
        dmin = [i for i in range(50) if deg[i] == deg.min()]
        med = sorted(deg)[(50 - 1) // 2]
        gaps_med = np.abs(deg - med)
        dmed = [i for i in range(50) if gaps_med[i] == gaps_med.min()]
        gaps_mean = np.abs(deg - deg.mean())
        dmean = [i for i in range(50) if gaps_mean[i] == gaps_mean.min()]
        lm = select_degree_landmarks(g)
        assert lm.max == scan(dmax, True)
        assert lm.min == scan(dmin, False)
        assert lm.median == scan(dmed, True)
        assert lm.mean == scan(dmean, True)

    def test_label_equivariance_when_unique(self, rng):
        found = 0
        for _ in range(20):
            g = random_graph_min_degree(30, 0.25, rng)
            if not landmark_keys_unique(g):
                continue
            found += 1
            pi = random_permutation(30, rng)
            h = permute(g, pi)
            if not landmark_keys_unique(h):
                continue
            lg = select_degree_landmarks(g)
            lh = select_degree_landmarks(h)
            assert lh == tuple(pi[list(lg)])
        assert found >= 5


class TestInitialDistributions:
    @pytest.mark.parametrize(
        "n,i,expected",
        [(3, 0, [1, 0, 0]), (3, 2, [0, 0, 1]), (1, 0, [1])],
    )
    def test_delta(self, n, i, expected):
        assert np.array_equal(delta_distribution(n, i), expected)

    def test_delta_out_of_range(self):
        with pytest.raises(ValueError):
            delta_distribution(3, 3)

    def test_ego_path_center(self, path3):
        assert np.allclose(ego_uniform_distribution(path3, 1), [1 / 3, 1 / 3, 1 / 3])

    def test_ego_star_center(self, star5):
        assert np.allclose(ego_uniform_distribution(star5, 0), 0.2)

    def test_ego_k2_leaf(self, k2):
        assert np.allclose(ego_uniform_distribution(k2, 0), [0.5, 0.5])

    def test_ego_out_of_range(self, k2):
        with pytest.raises(ValueError):
            ego_uniform_distribution(k2, 5)
