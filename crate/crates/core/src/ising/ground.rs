use super::hamiltonian::{IndexedRegion, Region, SpinConfig};
use crate::field::ExternalField;
use crate::maxflow::FlowNetwork;

/// Exact minimizer of `H^{bc}` by an s–t minimum cut.
///
/// The boundary is folded into an effective field `f_v + bc·k_v`; the source
/// side of the cut is the `+1` phase. Sites not reachable from the source in
/// the final residual graph get `-1`.
pub fn ground_state<F: ExternalField + ?Sized>(region: &Region, field: &F) -> SpinConfig {
    let indexed = IndexedRegion::new(&region.omega);
    let spins = ground_spins(&indexed, region.bc.sign(), field);
    SpinConfig::from_indexed(&indexed, spins, region.bc, field)
}

pub(crate) fn ground_spins<F: ExternalField + ?Sized>(indexed: &IndexedRegion, bc_sign: f64, field: &F) -> Vec<i8> {
    let n = indexed.len();
    let (source, sink) = (n, n + 1);
    let mut net = FlowNetwork::new(n + 2);
    for &(i, j) in &indexed.edges {
        net.add_edge(i, j, 2.0);
        net.add_edge(j, i, 2.0);
    }
    for (i, &v) in indexed.sites.iter().enumerate() {
        let eff = field.f(v) + bc_sign * f64::from(indexed.outside[i]);
        if eff > 0.0 {
            net.add_edge(source, i, 2.0 * eff);
        } else if eff < 0.0 {
            net.add_edge(i, sink, -2.0 * eff);
        }
    }
    net.max_flow(source, sink);
    let side = net.source_side(source);
    side[..n].iter().map(|&s| if s { 1 } else { -1 }).collect()
}
