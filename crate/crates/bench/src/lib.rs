//! Workloads shared by the benchmarks: the module families of the verification suites.

use destab::steenrod::{bv1, free, sphere, ModuleWindow, SteenrodAlgebra};

/// `(label, module)` pairs at prime `p`, each small enough for a benchmark iteration.
pub fn workloads(p: u32, deg_max: i32) -> Vec<(String, ModuleWindow)> {
    let alg = SteenrodAlgebra::shared(p, deg_max);
    vec![
        ("sphere(0)".into(), sphere(p, 0)),
        ("sphere(-3)".into(), sphere(p, -3)),
        ("bv1(10)".into(), bv1(p, 10)),
        ("free(0)".into(), free(&alg, 0, deg_max)),
    ]
}
