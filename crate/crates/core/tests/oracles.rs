//! Independent oracles for the algorithmic code paths.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pbrcheck::appendix::{primed_expansion, LinearMap2};
use pbrcheck::ontic::{feasibility, forbidden_constraints, lattice_distributions, OnticModel, ResponseTable};
use pbrcheck::{expand, prepared_state, xi_basis, Amplitude, LocalDetectorParams, Preparation, XiIndex};

fn c(re: f64) -> Amplitude {
    Amplitude::new(re, 0.0)
}

/// Gaussian elimination with partial pivoting.
fn solve(mut m: Vec<Vec<Amplitude>>, mut b: Vec<Amplitude>) -> Vec<Amplitude> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm())).unwrap();
        m.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                let t = m[col][k];
                m[row][k] -= f * t;
            }
            let t = b[col];
            b[row] -= f * t;
        }
    }
    let mut x = vec![c(0.0); n];
    for row in (0..n).rev() {
        let s: Amplitude = (row + 1..n).map(|k| m[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / m[row][row];
    }
    x
}

fn inverse2(m: &LinearMap2) -> [[Amplitude; 2]; 2] {
    let [[a, b], [cc, d]] = m.entries;
    let det = a * d - b * cc;
    [[d / det, -b / det], [-cc / det, a / det]]
}

/// Solves `√2·ξ1 = Σ c(k,l) a′_k ⊗ b′_l` where `|A,j⟩ = Σ_k u(j,k)|A′,k⟩`,
/// so `a′_k` has computational components `(u⁻¹)(k, ·)`.
fn change_of_basis_oracle(p: &LocalDetectorParams) -> [[Amplitude; 2]; 2] {
    let (ui, vi) = (inverse2(&p.u), inverse2(&p.u_prime));
    let mut m = vec![vec![c(0.0); 4]; 4];
    for (col, (k, l)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
        for x in 0..2 {
            for y in 0..2 {
                m[2 * x + y][col] = ui[k][x] * vi[l][y];
            }
        }
    }
    let x = solve(m, vec![c(0.0), c(1.0), c(1.0), c(0.0)]);
    [[x[0], x[1]], [x[2], x[3]]]
}

fn random_map(rng: &mut ChaCha8Rng) -> LinearMap2 {
    LinearMap2::new(std::array::from_fn(|_| {
        std::array::from_fn(|_| Amplitude::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }))
}

#[test]
fn primed_expansion_matches_change_of_basis() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 1000 {
        let Ok(p) = LocalDetectorParams::new(random_map(&mut rng), random_map(&mut rng)) else { continue };
        if p.u.det().norm() < 1e-2 || p.u_prime.det().norm() < 1e-2 {
            continue;
        }
        let lib = primed_expansion(&p).unwrap();
        let oracle = change_of_basis_oracle(&p);
        let scale = lib.c.iter().flatten().map(|a| a.norm()).fold(1.0, f64::max);
        for k in 0..2 {
            for l in 0..2 {
                assert!((lib.c[k][l] - oracle[k][l]).norm() < 1e-9 * scale, "{:?}", p);
            }
        }
        checked += 1;
    }
}

#[test]
fn zero_zero_expansion_against_hand_literals() {
    let h = 0.5;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let literals = [[0.0, r, r, 0.0], [h, -h, h, h], [h, h, -h, h], [r, 0.0, 0.0, -r]];
    for (lib, lit) in xi_basis().vectors().iter().zip(literals) {
        for (a, b) in lib.amps().iter().zip(lit) {
            assert!((a - c(b)).norm() < 1e-15);
        }
    }
    // ⟨ξj|00⟩ is the first computational component of each ξj.
    let coeffs = expand(&prepared_state(Preparation::new(pbrcheck::SingleChoice::Zero, pbrcheck::SingleChoice::Zero)), &xi_basis()).unwrap();
    for (got, lit) in coeffs.iter().zip(literals) {
        assert!((got - c(lit[0])).norm() < 1e-12);
    }
}

/// Every deterministic table for `N ≤ 2`, checked cell by cell.
fn brute_force_feasible(m: &OnticModel) -> bool {
    let n = m.size();
    let cells = n * n;
    let constraints = forbidden_constraints(m).unwrap();
    (0..4usize.pow(cells as u32)).any(|code| {
        let rows = (0..cells)
            .map(|i| {
                let mut row = [0.0; 4];
                row[(code / 4usize.pow(i as u32)) % 4] = 1.0;
                row
            })
            .collect();
        let table = ResponseTable::new(n, rows).unwrap();
        constraints.iter().all(|c| c.evaluate(&table) == 0.0)
    })
}

/// A cell can be assigned some outcome iff at least one forbidden outcome leaves it untouched.
fn propagation_feasible(m: &OnticModel) -> bool {
    let n = m.size();
    let w = |choice, i: usize| m.distribution(choice).weights()[i];
    (0..n).all(|la| {
        (0..n).all(|lb| {
            Preparation::ALL.iter().any(|p| w(p.a_choice, la) * w(p.b_choice, lb) == 0.0)
        })
    })
}

#[test]
fn feasibility_matches_brute_force_on_lattice() {
    let mut seen = 0;
    for n in 1..=2 {
        let dists = lattice_distributions(n, 4);
        for z in &dists {
            for p in &dists {
                let m = OnticModel::new(z.clone(), p.clone()).unwrap();
                let v = feasibility(&m).unwrap();
                assert_eq!(v.is_feasible(), brute_force_feasible(&m), "{}", m.to_text());
                seen += 1;
            }
        }
    }
    assert_eq!(seen, 1 + 25);
}

#[test]
fn feasibility_matches_propagation_up_to_eight() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..2000 {
        let n = rng.random_range(1..=8);
        let mut draw = || {
            let mut w: Vec<f64> = (0..n).map(|_| if rng.random_bool(0.5) { 0.0 } else { rng.random_range(1..5) as f64 }).collect();
            if w.iter().all(|x| *x == 0.0) {
                w[0] = 1.0;
            }
            let s: f64 = w.iter().sum();
            w.iter().map(|x| x / s).collect::<Vec<_>>()
        };
        let (z, p) = (draw(), draw());
        let Ok(m) = OnticModel::from_weights(&z, &p) else { continue };
        assert_eq!(feasibility(&m).unwrap().is_feasible(), propagation_feasible(&m), "{}", m.to_text());
    }
}

#[test]
fn forbidden_index_matches_literal_table() {
    let expected = [("00", 1u8), ("0+", 2), ("+0", 3), ("++", 4)];
    let table = pbrcheck::forbidden_table().unwrap();
    for (p, (label, k)) in Preparation::ALL.iter().zip(expected) {
        assert_eq!(p.label(), label);
        assert_eq!(table.get(*p), XiIndex::new(k).unwrap());
    }
}
