use fracshrink::params::*;
use fracshrink::curvature::*;

fn main() {
    let q = QuadratureConfig::default();
    let p = KernelParams::new(2, 0.5).unwrap();
    let k = ball_curvature_constant(&p, &q).unwrap().value;
    let c = lemtech_constant(&p).unwrap();
    println!("k(2,0.5) = {k:.10}, c(2,0.5) = {c:.10}");
    for r in [0.9, 0.99, 0.999, 0.9999] {
        let set = RadialSet::annulus(r, 1.0).unwrap();
        let exact = fractional_curvature(&p, &set, 0, &q).unwrap().value;
        let model = annulus_inner_curvature_asymptotic(&p, r).unwrap();
        println!("r={r}: exact={exact:.8} model={model:.8} ratio-1={:.6e}", model/exact - 1.0);
    }
}
