use std::fmt::Debug;
use std::ops::{Neg, Sub};

use num_traits::{One, Zero};

/// Commutative ring with identity. Just enough structure for division-free
/// determinant and characteristic-polynomial algorithms.
pub trait Ring: Clone + Debug + PartialEq + Zero + One + Sub<Output = Self> + Neg<Output = Self> {}

impl<T> Ring for T where T: Clone + Debug + PartialEq + Zero + One + Sub<Output = T> + Neg<Output = T> {}
