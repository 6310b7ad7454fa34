from __future__ import annotations

import numpy as np
import pytest

from risdrl.errors import InfeasibleAssociationError
from risdrl.network.association import AssociationMatrix, enumerate_associations, repair_association
from risdrl.network.constraints import check_constraints
from risdrl.network.link import evaluate_configuration
from risdrl.ris.phase import phase_vector


def test_from_indices_builds_full_matrix():
    assoc = AssociationMatrix.from_indices(1, [0, 1, 1], 2)
    np.testing.assert_array_equal(assoc.matrix(), [[0, 1, 0, 0], [1, 0, 1, 1]])
    assert assoc.ris_bs == 1
    np.testing.assert_array_equal(assoc.ue_bs, [0, 1, 1])
    np.testing.assert_array_equal(assoc.served_by(1), [1, 2])


def test_no_ris_owner():
    assoc = AssociationMatrix.from_indices(None, [0, 0], 2)
    assert assoc.ris_bs is None
    assert not assoc.c0.any()


def test_equality_and_copy():
    assoc = AssociationMatrix.from_indices(0, [1, 0], 2)
    clone = assoc.copy()
    assert clone == assoc
    clone.c[:, 0] = [1, 0]
    assert clone != assoc


def test_repair_moves_strongest_ue_to_idle_bs():
    assoc = AssociationMatrix.from_indices(0, [0, 0, 0], 2)
    norms = np.array([[1.0, 1.0, 1.0], [0.1, 0.5, 0.5]])
    repaired = repair_association(assoc, norms)
    np.testing.assert_array_equal(repaired.ue_bs, [0, 1, 0])
    np.testing.assert_array_equal(assoc.ue_bs, [0, 0, 0])


def test_repair_leaves_valid_association_alone():
    assoc = AssociationMatrix.from_indices(1, [0, 1, 1], 2)
    assert repair_association(assoc, np.ones((2, 3))) == assoc


def test_repair_fills_every_idle_bs():
    assoc = AssociationMatrix.from_indices(0, [2, 2, 2, 2], 3)
    repaired = repair_association(assoc, np.ones((3, 4)))
    assert np.all(repaired.c.sum(axis=1) >= 1)
    assert np.all(repaired.c.sum(axis=0) == 1)


def test_repair_is_infeasible_with_fewer_ues_than_bss():
    with pytest.raises(InfeasibleAssociationError):
        repair_association(AssociationMatrix.from_indices(0, [0], 2), np.ones((2, 1)))


def test_enumeration_counts():
    assert len(list(enumerate_associations(2, 2))) == 2 * 2 ** 2
    assert len(list(enumerate_associations(2, 2, strict=True))) == 2 * 2
    no_ris = list(enumerate_associations(3, 2, with_ris=False))
    assert len(no_ris) == 9
    assert all(a.ris_bs is None for a in no_ris)


def _budget(env, assoc):
    net = env.network
    f = phase_vector(0.0, 0.0, net.ris_h, net.ris_v)
    return evaluate_configuration(env.channels, f, assoc, net.p_max_watts, net.noise_watts)


def test_valid_configuration_meets_all_constraints(ci_env):
    assoc = AssociationMatrix.from_indices(0, [0, 1], 2)
    report = check_constraints(assoc, _budget(ci_env, assoc), r_min=0.0)
    assert report.all_ok
    assert report.violations() == []


def test_constraint_report_flags_violations(ci_env):
    assoc = AssociationMatrix.from_indices(None, [1, 1], 2)
    report = check_constraints(assoc, _budget(ci_env, assoc), r_min=1e6)
    assert not report.all_ok
    assert set(report.violations()) == {"min_rate", "every_bs_serves", "single_ris_owner"}
    assert report.outage_ues == (0, 1)
    assert report.power and report.single_server
