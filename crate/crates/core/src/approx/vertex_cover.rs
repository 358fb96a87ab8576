use std::collections::BTreeSet;

/// Both endpoints of a maximal matching grown greedily in edge order.
/// Covers every edge and is at most twice a minimum cover.
pub fn vertex_cover_2approx(edges: &[(usize, usize)]) -> BTreeSet<usize> {
    let mut cover = BTreeSet::new();
    for &(a, b) in edges {
        if !cover.contains(&a) && !cover.contains(&b) {
            cover.insert(a);
            cover.insert(b);
        }
    }
    cover
}
