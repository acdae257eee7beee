//! Adam with decoupled weight decay and a linear warmup schedule.

use crate::model::Parameters;

/// `lr_t = peak · min(1, t / warmup_steps)`; constant after warmup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarmupSchedule {
    pub peak: f64,
    pub warmup_steps: u64,
}

impl WarmupSchedule {
    pub fn lr_at(&self, step: u64) -> f64 {
        if step >= self.warmup_steps {
            self.peak
        } else {
            self.peak * step as f64 / self.warmup_steps as f64
        }
    }
}

#[derive(Debug, Clone)]
pub struct AdamW {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
    m: Parameters,
    v: Parameters,
    t: u64,
}

impl AdamW {
    pub fn new(shape: &Parameters, betas: (f64, f64), eps: f64, weight_decay: f64) -> Self {
        let zeros = |p: &Parameters| {
            let mut z = p.clone();
            for b in z.blocks_mut() {
                b.fill(0.0);
            }
            z
        };
        AdamW {
            beta1: betas.0,
            beta2: betas.1,
            eps,
            weight_decay,
            m: zeros(shape),
            v: zeros(shape),
            t: 0,
        }
    }

    pub fn steps_taken(&self) -> u64 {
        self.t
    }

    /// `θ ← θ − lr·wd·θ − lr·m̂/(√v̂ + ε)` with bias-corrected moments.
    pub fn step(&mut self, params: &mut Parameters, grads: &Parameters, lr: f64) {
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        let decay = lr * self.weight_decay;
        let (b1, b2, eps) = (self.beta1, self.beta2, self.eps);
        for (((p, g), m), v) in params
            .blocks_mut()
            .into_iter()
            .zip(grads.blocks())
            .zip(self.m.blocks_mut())
            .zip(self.v.blocks_mut())
        {
            for i in 0..p.len() {
                m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                let m_hat = m[i] / bc1;
                let v_hat = v[i] / bc2;
                p[i] -= decay * p[i] + lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
    }
}
