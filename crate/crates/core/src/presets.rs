//! Named specifications used by the reproduction runs and the test suites.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::inference::{infer_graph, InferenceOptions};
use crate::model::{ARProcessSpec, BivariateParams, CausalGraph, ConditioningPolicy, DataSource};

/// Bundled bivariate example: feedback both ways and correlated innovations.
pub fn example_bivariate() -> ARProcessSpec {
    ARProcessSpec::bivariate(BivariateParams {
        c_xx: 0.5,
        c_yy: 0.4,
        c_xy: 0.5,
        c_yx: 0.3,
        sigma_v2: 1.0,
        sigma_w2: 1.0,
        gamma_vw: 0.2,
    })
    .expect("example spec is valid")
}

fn three_node(c_yx: f64, gamma_vw: f64) -> Result<ARProcessSpec> {
    // channel order z, x, y; row = target, column = source
    let mut c = DMatrix::from_diagonal_element(3, 3, 0.4);
    c[(0, 1)] = 0.6; // x -> z
    c[(2, 0)] = 0.6; // z -> y
    c[(1, 2)] = c_yx; // y -> x
    let mut w = DMatrix::identity(3, 3);
    w[(1, 2)] = gamma_vw;
    w[(2, 1)] = gamma_vw;
    ARProcessSpec::new(vec!["z".into(), "x".into(), "y".into()], c, w)
}

/// Chain `x → z → y` without direct feedback.
pub fn chain_case_a(gamma_vw: f64) -> Result<ARProcessSpec> {
    three_node(0.0, gamma_vw)
}

/// The chain plus a direct coupling `y → x`.
pub fn chain_case_b(c_yx: f64, gamma_vw: f64) -> Result<ARProcessSpec> {
    three_node(c_yx, gamma_vw)
}

/// Edges implied by a spec's nonzero couplings and noise correlations.
pub fn true_graph(spec: &ARProcessSpec) -> CausalGraph {
    let names = spec.channel_names();
    let d = names.len();
    let mut g = CausalGraph::new(names.to_vec(), ConditioningPolicy::CausallyConditioned);
    for i in 0..d {
        for j in 0..d {
            let c = spec.coupling_from(i, j);
            if i != j && c != 0.0 {
                g.add_dynamic(&names[i], &names[j], c.abs());
            }
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            let w = spec.noise_cov()[(i, j)];
            if w != 0.0 {
                g.add_instantaneous(&names[i], &names[j], w.abs());
            }
        }
    }
    g
}

/// Graphs for the chain network with and without causal conditioning.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditioningContrast {
    pub truth: CausalGraph,
    pub pairwise: CausalGraph,
    pub conditioned: CausalGraph,
}

impl ConditioningContrast {
    /// Dynamic edges found pairwise but absent under conditioning.
    pub fn spurious_pairwise_edges(&self) -> Vec<(String, String)> {
        let cond = self.conditioned.dynamic_pairs();
        self.pairwise
            .dynamic_pairs()
            .into_iter()
            .filter(|e| !cond.contains(e))
            .collect()
    }
}

pub fn conditioning_contrast(
    spec: &ARProcessSpec,
    source: DataSource<'_>,
    opts: &InferenceOptions,
) -> Result<ConditioningContrast> {
    Ok(ConditioningContrast {
        truth: true_graph(spec),
        pairwise: infer_graph(source, ConditioningPolicy::Pairwise, opts)?,
        conditioned: infer_graph(source, ConditioningPolicy::CausallyConditioned, opts)?,
    })
}
