//! Uniform Cartesian meshes of a square domain.
//!
//! Elements, vertices and faces are numbered lexicographically: element
//! `(row, col)` has id `row * n + col`, vertex `(j, i)` has id `j * (n + 1) + i`.
//! Faces are listed as all vertical faces (row by row, left to right)
//! followed by all horizontal faces (bottom to top).
//!
//! Interior faces carry the normal `+x` or `+y`; the `plus` element is the one
//! whose outward normal agrees with it (the left or lower element). Boundary
//! faces carry the outward normal of their only element.

use crate::error::{Error, Result};

/// Coordinate axis of a face normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
        }
    }
}

/// One of the four sides of the reference square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];

    /// Axis of the outward normal.
    pub fn axis(self) -> Axis {
        match self {
            Side::Left | Side::Right => Axis::X,
            Side::Bottom | Side::Top => Axis::Y,
        }
    }

    /// Sign of the outward normal along [`Side::axis`].
    pub fn sign(self) -> f64 {
        match self {
            Side::Left | Side::Bottom => -1.0,
            Side::Right | Side::Top => 1.0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Side::Left => 0,
            Side::Right => 1,
            Side::Bottom => 2,
            Side::Top => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceKind {
    Interior,
    Boundary,
}

/// An edge of the mesh with its orientation data.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub id: usize,
    pub kind: FaceKind,
    /// Normal axis; the normal is `normal_sign * e_axis`.
    pub axis: Axis,
    /// `+1` on interior faces, the outward sign on boundary faces.
    pub normal_sign: f64,
    /// Element whose outward normal on this face equals the face normal.
    pub plus: usize,
    /// Side of `plus` on which the face lies.
    pub plus_side: Side,
    /// Opposite element and its side; `None` on the boundary.
    pub minus: Option<(usize, Side)>,
    pub measure: f64,
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.kind == FaceKind::Boundary
    }

    /// Unit normal `n_F` as a 2-vector.
    pub fn normal(&self) -> [f64; 2] {
        let mut n = [0.0; 2];
        n[self.axis.index()] = self.normal_sign;
        n
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vertex {
    pub id: usize,
    /// Lattice position `(i, j)`, `i` along x.
    pub lattice: (usize, usize),
    pub coords: [f64; 2],
    pub on_boundary: bool,
}

/// Axis-aligned square element; its affine map is `x = origin + h/2 (xi + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Element {
    pub id: usize,
    pub row: usize,
    pub col: usize,
    pub origin: [f64; 2],
}

/// Uniform `n x n` partition of `[a, b]^2`.
#[derive(Debug, Clone)]
pub struct Mesh {
    lower: f64,
    upper: f64,
    n: usize,
    h: f64,
    elements: Vec<Element>,
    vertices: Vec<Vertex>,
    faces: Vec<Face>,
    /// Face ids of each element indexed by [`Side::index`].
    element_faces: Vec<[usize; 4]>,
}

impl Mesh {
    /// Builds the uniform mesh with `n` elements per direction on `[a, b]^2`.
    pub fn new(n: usize, domain: (f64, f64)) -> Result<Self> {
        let (a, b) = domain;
        if n == 0 {
            return Err(Error::InvalidArgument("mesh needs at least one element per direction".into()));
        }
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument(format!("empty or invalid domain [{a}, {b}]")));
        }
        let h = (b - a) / n as f64;

        let elements = (0..n * n)
            .map(|id| {
                let (row, col) = (id / n, id % n);
                Element { id, row, col, origin: [a + col as f64 * h, a + row as f64 * h] }
            })
            .collect();

        let vertices = (0..(n + 1) * (n + 1))
            .map(|id| {
                let (j, i) = (id / (n + 1), id % (n + 1));
                let coord = |k: usize| if k == n { b } else { a + k as f64 * h };
                Vertex {
                    id,
                    lattice: (i, j),
                    coords: [coord(i), coord(j)],
                    on_boundary: i == 0 || j == 0 || i == n || j == n,
                }
            })
            .collect();

        let mut faces = Vec::with_capacity(2 * n * (n + 1));
        let mut element_faces = vec![[usize::MAX; 4]; n * n];
        let mut push = |faces: &mut Vec<Face>, kind, axis, normal_sign, plus: (usize, Side), minus: Option<(usize, Side)>| {
            let id = faces.len();
            element_faces[plus.0][plus.1.index()] = id;
            if let Some((e, s)) = minus {
                element_faces[e][s.index()] = id;
            }
            faces.push(Face { id, kind, axis, normal_sign, plus: plus.0, plus_side: plus.1, minus, measure: h });
        };
        // vertical faces, x = a + i h
        for row in 0..n {
            for i in 0..=n {
                if i == 0 {
                    push(&mut faces, FaceKind::Boundary, Axis::X, -1.0, (row * n, Side::Left), None);
                } else if i == n {
                    push(&mut faces, FaceKind::Boundary, Axis::X, 1.0, (row * n + n - 1, Side::Right), None);
                } else {
                    let left = row * n + i - 1;
                    push(&mut faces, FaceKind::Interior, Axis::X, 1.0, (left, Side::Right), Some((left + 1, Side::Left)));
                }
            }
        }
        // horizontal faces, y = a + j h
        for j in 0..=n {
            for col in 0..n {
                if j == 0 {
                    push(&mut faces, FaceKind::Boundary, Axis::Y, -1.0, (col, Side::Bottom), None);
                } else if j == n {
                    push(&mut faces, FaceKind::Boundary, Axis::Y, 1.0, ((n - 1) * n + col, Side::Top), None);
                } else {
                    let below = (j - 1) * n + col;
                    push(&mut faces, FaceKind::Interior, Axis::Y, 1.0, (below, Side::Top), Some((below + n, Side::Bottom)));
                }
            }
        }

        Ok(Mesh { lower: a, upper: b, n, h, elements, vertices, faces, element_faces })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, id: usize) -> &Element {
        &self.elements[id]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Face ids of an element, indexed by [`Side::index`].
    pub fn element_faces(&self, element: usize) -> [usize; 4] {
        self.element_faces[element]
    }

    /// Neighbour across `side`, if any.
    pub fn neighbor(&self, element: usize, side: Side) -> Option<usize> {
        let face = &self.faces[self.element_faces[element][side.index()]];
        match face.minus {
            None => None,
            Some((m, _)) if m == element => Some(face.plus),
            Some((m, _)) => Some(m),
        }
    }

    pub fn vertex_id(&self, i: usize, j: usize) -> usize {
        j * (self.n + 1) + i
    }

    pub fn element_id(&self, row: usize, col: usize) -> usize {
        row * self.n + col
    }

    /// Interior vertices in lexicographic order.
    pub fn interior_vertices(&self) -> impl Iterator<Item = &Vertex> + '_ {
        self.vertices.iter().filter(|v| !v.on_boundary)
    }

    pub fn num_interior_vertices(&self) -> usize {
        (self.n - 1) * (self.n - 1)
    }

    /// Position of an interior vertex in [`Mesh::interior_vertices`].
    pub fn interior_vertex_index(&self, vertex_id: usize) -> Result<usize> {
        let v = self.interior_vertex(vertex_id)?;
        let (i, j) = v.lattice;
        Ok((j - 1) * (self.n - 1) + (i - 1))
    }

    fn interior_vertex(&self, vertex_id: usize) -> Result<&Vertex> {
        let v = self
            .vertices
            .get(vertex_id)
            .ok_or_else(|| Error::InvalidArgument(format!("vertex {vertex_id} does not exist")))?;
        if v.on_boundary {
            return Err(Error::Domain(format!("vertex {vertex_id} lies on the boundary; patches exist for interior vertices only")));
        }
        Ok(v)
    }

    /// Elements sharing an interior vertex, in lexicographic order.
    pub fn vertex_patch(&self, vertex_id: usize) -> Result<[usize; 4]> {
        let (i, j) = self.interior_vertex(vertex_id)?.lattice;
        Ok([
            self.element_id(j - 1, i - 1),
            self.element_id(j - 1, i),
            self.element_id(j, i - 1),
            self.element_id(j, i),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(Mesh::new(0, (0.0, 1.0)), Err(Error::InvalidArgument(_))));
        assert!(matches!(Mesh::new(2, (1.0, 1.0)), Err(Error::InvalidArgument(_))));
        assert!(matches!(Mesh::new(2, (1.0, -1.0)), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn thirty_two_by_thirty_two_mesh() {
        let mesh = Mesh::new(32, (-1.0, 1.0)).unwrap();
        assert_eq!(mesh.h(), 0.0625);
        assert_eq!(mesh.elements().len(), 1024);
        let interior = mesh.faces().iter().filter(|f| !f.is_boundary()).count();
        assert_eq!(interior, 1984);
        assert_eq!(mesh.faces().len() - interior, 128);
        assert_eq!(mesh.interior_vertices().count(), 961);
    }

    #[test]
    fn single_element() {
        let mesh = Mesh::new(1, (0.0, 1.0)).unwrap();
        assert_eq!(mesh.elements().len(), 1);
        assert!(mesh.faces().iter().all(Face::is_boundary));
        assert_eq!(mesh.faces().len(), 4);
        assert_eq!(mesh.interior_vertices().count(), 0);
    }

    #[test]
    fn orientation_convention() {
        let mesh = Mesh::new(3, (0.0, 3.0)).unwrap();
        for f in mesh.faces() {
            // outward normal of plus agrees with n_F
            assert_eq!(f.plus_side.axis(), f.axis);
            assert_eq!(f.plus_side.sign(), f.normal_sign);
            if let Some((m, s)) = f.minus {
                assert_ne!(m, f.plus);
                assert_eq!(s.sign(), -f.normal_sign);
                assert_eq!(f.normal_sign, 1.0);
            }
        }
        let n = 2;
        let mesh = Mesh::new(n, (0.0, 1.0)).unwrap();
        assert_eq!(mesh.faces().iter().filter(|f| !f.is_boundary()).count(), 4);
        assert_eq!(mesh.faces().iter().filter(|f| f.is_boundary()).count(), 8);
    }

    #[test]
    fn element_faces_cover_boundary() {
        let mesh = Mesh::new(4, (-1.0, 1.0)).unwrap();
        let mut seen = vec![0usize; mesh.faces().len()];
        for e in mesh.elements() {
            let fs = mesh.element_faces(e.id);
            let perimeter: f64 = fs.iter().map(|&f| mesh.faces()[f].measure).sum();
            assert!((perimeter - 4.0 * mesh.h()).abs() < 1e-14);
            for f in fs {
                seen[f] += 1;
            }
        }
        for f in mesh.faces() {
            assert_eq!(seen[f.id], if f.is_boundary() { 1 } else { 2 });
        }
    }

    #[test]
    fn patches() {
        let mesh = Mesh::new(2, (0.0, 1.0)).unwrap();
        let center = mesh.vertex_id(1, 1);
        assert_eq!(mesh.vertex_patch(center).unwrap(), [0, 1, 2, 3]);
        assert!(matches!(mesh.vertex_patch(0), Err(Error::Domain(_))));

        let mesh = Mesh::new(6, (0.0, 1.0)).unwrap();
        let a = mesh.vertex_patch(mesh.vertex_id(2, 3)).unwrap();
        let b = mesh.vertex_patch(mesh.vertex_id(3, 3)).unwrap();
        let shared = a.iter().filter(|e| b.contains(e)).count();
        assert_eq!(shared, 2);
        // every element lies in at most four patches
        let mut count = vec![0; mesh.elements().len()];
        for v in mesh.interior_vertices() {
            for e in mesh.vertex_patch(v.id).unwrap() {
                count[e] += 1;
            }
        }
        assert!(count.iter().all(|&c| (1..=4).contains(&c)));
        assert_eq!(count[mesh.element_id(2, 2)], 4);
    }
}
