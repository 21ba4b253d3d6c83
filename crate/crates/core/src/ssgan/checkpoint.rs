//! CGAN model checkpoint format (all integers and floats little-endian).
//!
//! ```text
//! magic        "CGAN"
//! version      u32 = 1
//! k            u32
//! hidden_dim   u32   (H)
//! z_dim        u32
//! flags        u32   bit 0 generator, bit 1 discriminator Adam, bit 2 generator Adam
//! dropout      f64
//! leaky_slope  f64
//! g_hidden     u32
//! d_hidden     u32
//! feature_idx  u32
//! D shapes     u32 layer count, then (u32 in, u32 out) per layer
//! G shapes     same, only if bit 0
//! D params     f64 per value; per layer weights (row-major out × in) then bias
//! G params     same layout, only if bit 0
//! D Adam       u64 step, f64 epsilon, first moments, second moments (param layout)
//! G Adam       same, only if bit 2
//! ```
//!
//! Parameters are always stored as `f64`, whatever scalar type the model
//! was trained with.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::adam::Adam;
use super::mlp::{Dense, Mlp, ParamBuffers};
use super::nets::{Discriminator, Generator, ModelConfig};
use super::train::GanModel;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const CGAN_MAGIC: [u8; 4] = *b"CGAN";
pub const CGAN_VERSION: u32 = 1;

const HAS_GENERATOR: u32 = 1;
const HAS_ADAM_D: u32 = 2;
const HAS_ADAM_G: u32 = 4;

struct Out<W>(W);

impl<W: Write> Out<W> {
    fn u32(&mut self, v: usize) -> io::Result<()> {
        let v = u32::try_from(v).map_err(|_| io::Error::other("value exceeds u32"))?;
        self.0.write_all(&v.to_le_bytes())
    }
    fn f64(&mut self, v: f64) -> io::Result<()> {
        self.0.write_all(&v.to_le_bytes())
    }
    fn values<T: Scalar>(&mut self, vs: &[T]) -> io::Result<()> {
        vs.iter().try_for_each(|v| self.f64(v.as_f64()))
    }
    fn shapes<T>(&mut self, mlp: &Mlp<T>) -> io::Result<()> {
        self.u32(mlp.layers.len())?;
        for l in &mlp.layers {
            self.u32(l.in_dim)?;
            self.u32(l.out_dim)?;
        }
        Ok(())
    }
    fn buffers<T: Scalar>(&mut self, b: &ParamBuffers<T>) -> io::Result<()> {
        b.slices().try_for_each(|s| self.values(s))
    }
    fn adam<T: Scalar>(&mut self, a: &Adam<T>) -> io::Result<()> {
        self.0.write_all(&a.step.to_le_bytes())?;
        self.f64(a.epsilon.as_f64())?;
        self.buffers(&a.m)?;
        self.buffers(&a.v)
    }
}

pub fn write_model_to<T: Scalar, W: Write>(model: &GanModel<T>, out: W) -> io::Result<()> {
    let mut o = Out(BufWriter::new(out));
    let c = &model.config;
    let mut flags = 0;
    if model.generator.is_some() {
        flags |= HAS_GENERATOR;
    }
    if model.adam_discriminator.is_some() {
        flags |= HAS_ADAM_D;
    }
    if model.generator.is_some() && model.adam_generator.is_some() {
        flags |= HAS_ADAM_G;
    }
    o.0.write_all(&CGAN_MAGIC)?;
    o.u32(CGAN_VERSION as usize)?;
    o.u32(c.k)?;
    o.u32(c.hidden_dim)?;
    o.u32(c.z_dim)?;
    o.u32(flags as usize)?;
    o.f64(c.dropout)?;
    o.f64(c.leaky_slope)?;
    o.u32(c.generator_hidden_layers)?;
    o.u32(c.discriminator_hidden_layers)?;
    o.u32(model.discriminator.feature_layer_index)?;
    o.shapes(&model.discriminator.mlp)?;
    if let Some(g) = &model.generator {
        o.shapes(&g.mlp)?;
    }
    for s in model.discriminator.mlp.param_slices() {
        o.values(s)?;
    }
    if let Some(g) = &model.generator {
        for s in g.mlp.param_slices() {
            o.values(s)?;
        }
    }
    if let Some(a) = &model.adam_discriminator {
        o.adam(a)?;
    }
    if flags & HAS_ADAM_G != 0 {
        o.adam(model.adam_generator.as_ref().expect("flag set"))?;
    }
    o.0.flush()
}

pub fn write_model<T: Scalar>(model: &GanModel<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_model_to(model, file).map_err(|e| Error::io(path, e))
}

struct In<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> In<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut b = [0; N];
        self.inner.read_exact(&mut b).map_err(|e| match e.kind() {
            io::ErrorKind::UnexpectedEof => Error::Corruption {
                offset: self.offset,
                message: "truncated checkpoint".into(),
            },
            _ => Error::io("<checkpoint stream>", e),
        })?;
        self.offset += N as u64;
        Ok(b)
    }
    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.bytes()?) as usize)
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }
    fn fill<T: Scalar>(&mut self, dst: &mut [T]) -> Result<()> {
        for v in dst {
            let x = self.f64()?;
            if !x.is_finite() {
                return Err(Error::Corruption {
                    offset: self.offset - 8,
                    message: "non-finite parameter".into(),
                });
            }
            *v = T::lit(x);
        }
        Ok(())
    }
    fn mlp<T: Scalar>(&mut self, slope: T, input_dropout: T, hidden_dropout: T) -> Result<Mlp<T>> {
        let n = self.u32()?;
        if n == 0 || n > 64 {
            return Err(Error::Format(format!("implausible layer count {n}")));
        }
        let mut layers = Vec::with_capacity(n);
        for _ in 0..n {
            let in_dim = self.u32()?;
            let out_dim = self.u32()?;
            layers.push(Dense::zeros(in_dim, out_dim));
        }
        let mlp = Mlp {
            layers,
            slope,
            input_dropout,
            hidden_dropout,
        };
        if !mlp.shapes_chain() {
            return Err(Error::Format("layer shapes do not chain".into()));
        }
        Ok(mlp)
    }
    fn adam<T: Scalar>(&mut self, mlp: &Mlp<T>) -> Result<Adam<T>> {
        let step = u64::from_le_bytes(self.bytes()?);
        let mut a = Adam::new(mlp, T::lit(self.f64()?));
        a.step = step;
        for s in a.m.slices_mut() {
            self.fill(s)?;
        }
        for s in a.v.slices_mut() {
            self.fill(s)?;
        }
        Ok(a)
    }
}

pub fn read_model_from<T: Scalar, R: Read>(input: R) -> Result<GanModel<T>> {
    let mut r = In { inner: input, offset: 0 };
    if r.bytes::<4>()? != CGAN_MAGIC {
        return Err(Error::Format("bad checkpoint magic".into()));
    }
    let version = r.u32()?;
    if version != CGAN_VERSION as usize {
        return Err(Error::Format(format!("unsupported checkpoint version {version}")));
    }
    let k = r.u32()?;
    let hidden_dim = r.u32()?;
    let z_dim = r.u32()?;
    let flags = r.u32()? as u32;
    let config = ModelConfig {
        k,
        hidden_dim,
        z_dim,
        dropout: r.f64()?,
        leaky_slope: r.f64()?,
        generator_hidden_layers: r.u32()?,
        discriminator_hidden_layers: r.u32()?,
    };
    config.validate()?;
    let feature_layer_index = r.u32()?;
    let (slope, dropout) = (T::lit(config.leaky_slope), T::lit(config.dropout));
    let mut d_mlp = r.mlp(slope, dropout, dropout)?;
    let mut g_mlp = if flags & HAS_GENERATOR != 0 {
        Some(r.mlp(slope, T::zero(), dropout)?)
    } else {
        None
    };
    for s in d_mlp.param_slices_mut() {
        r.fill(s)?;
    }
    if let Some(g) = &mut g_mlp {
        for s in g.param_slices_mut() {
            r.fill(s)?;
        }
    }
    let adam_discriminator = if flags & HAS_ADAM_D != 0 {
        Some(r.adam(&d_mlp)?)
    } else {
        None
    };
    let adam_generator = match (&g_mlp, flags & HAS_ADAM_G != 0) {
        (Some(g), true) => Some(r.adam(g)?),
        _ => None,
    };
    let mut probe = [0u8; 1];
    if r.inner.read(&mut probe).map_err(|e| Error::io("<checkpoint stream>", e))? != 0 {
        return Err(Error::Corruption {
            offset: r.offset,
            message: "trailing bytes after checkpoint".into(),
        });
    }
    let discriminator = Discriminator {
        mlp: d_mlp,
        k,
        feature_layer_index,
    };
    discriminator.validate()?;
    if discriminator.input_dim() != hidden_dim {
        return Err(Error::Format("discriminator input width differs from H".into()));
    }
    let generator = match g_mlp {
        Some(mlp) => {
            if mlp.in_dim() != z_dim + k || mlp.out_dim() != hidden_dim {
                return Err(Error::Format("generator shapes inconsistent with header".into()));
            }
            Some(Generator { mlp, z_dim, k })
        }
        None => None,
    };
    Ok(GanModel {
        config,
        discriminator,
        generator,
        adam_discriminator,
        adam_generator,
    })
}

pub fn read_model<T: Scalar>(path: impl AsRef<Path>) -> Result<GanModel<T>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_model_from(BufReader::new(file))
}
