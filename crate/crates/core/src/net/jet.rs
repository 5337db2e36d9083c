use super::config::{MAX_INPUTS, MAX_OUTPUTS};

/// Value, gradient and diagonal Hessian of one network output.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FieldJet {
    pub value: f64,
    pub d1: [f64; MAX_INPUTS],
    pub d2: [f64; MAX_INPUTS],
}

impl FieldJet {
    pub fn constant(value: f64) -> Self {
        Self {
            value,
            ..Self::default()
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = *self;
        out.value *= c;
        out.d1.iter_mut().for_each(|v| *v *= c);
        out.d2.iter_mut().for_each(|v| *v *= c);
        out
    }
}

/// Jets of every network output at one input point.
///
/// Second derivatives are diagonal only; entries that were not requested by
/// the evaluation plan are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub n_in: usize,
    pub n_out: usize,
    pub fields: [FieldJet; MAX_OUTPUTS],
}

impl Jet {
    pub fn zeros(n_in: usize, n_out: usize) -> Self {
        Self {
            n_in,
            n_out,
            fields: [FieldJet::default(); MAX_OUTPUTS],
        }
    }

    pub fn field(&self, k: usize) -> &FieldJet {
        &self.fields[k]
    }

    pub fn field_mut(&mut self, k: usize) -> &mut FieldJet {
        &mut self.fields[k]
    }

    pub fn value(&self, k: usize) -> f64 {
        self.fields[k].value
    }

    pub fn d1(&self, k: usize, axis: usize) -> f64 {
        self.fields[k].d1[axis]
    }

    pub fn d2(&self, k: usize, axis: usize) -> f64 {
        self.fields[k].d2[axis]
    }

    pub fn clear(&mut self) {
        self.fields = [FieldJet::default(); MAX_OUTPUTS];
    }
}
