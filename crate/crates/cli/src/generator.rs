//! `kind:key=value,...` signal generator specs.

use std::collections::BTreeMap;

use adaspec::signal::{gen_fm_sinusoid, gen_impulse, gen_sinusoid};
use adaspec::Signal;
use anyhow::{anyhow, bail, Context, Result};

pub const SAMPLE_RATE: u32 = 44_100;

const GRAMMAR: &str = "expected sin:freq=F,dur=D[,amp=A] | fm:carrier=F,rate=R,depth=D,dur=T | impulse:pos=N,dur=T";

struct Params<'a> {
    kind: &'a str,
    values: BTreeMap<&'a str, &'a str>,
}

impl<'a> Params<'a> {
    fn parse(spec: &'a str) -> Result<Self> {
        let (kind, rest) = spec.split_once(':').ok_or_else(|| anyhow!("generator '{spec}': {GRAMMAR}"))?;
        let mut values = BTreeMap::new();
        for pair in rest.split(',').filter(|p| !p.is_empty()) {
            let (k, v) =
                pair.split_once('=').ok_or_else(|| anyhow!("generator '{spec}': '{pair}' is not key=value"))?;
            if values.insert(k.trim(), v.trim()).is_some() {
                bail!("generator '{spec}': '{k}' given twice");
            }
        }
        Ok(Self { kind, values })
    }

    fn take<T: std::str::FromStr>(&mut self, key: &str) -> Result<T>
    where
        T::Err: std::error::Error + Send + Sync + 'static,
    {
        let raw = self.values.remove(key).ok_or_else(|| anyhow!("{} generator needs '{key}'", self.kind))?;
        raw.parse().with_context(|| format!("{} generator: bad value '{raw}' for '{key}'", self.kind))
    }

    fn take_or<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::error::Error + Send + Sync + 'static,
    {
        if self.values.contains_key(key) {
            self.take(key)
        } else {
            Ok(default)
        }
    }

    fn finish(self) -> Result<()> {
        match self.values.keys().next() {
            Some(k) => bail!("{} generator: unknown parameter '{k}'", self.kind),
            None => Ok(()),
        }
    }
}

pub fn generate(spec: &str) -> Result<Signal> {
    let mut p = Params::parse(spec)?;
    let signal = match p.kind {
        "sin" => {
            let (freq, dur, amp) = (p.take("freq")?, p.take("dur")?, p.take_or("amp", 1.0)?);
            gen_sinusoid(freq, dur, SAMPLE_RATE, amp)
        }
        "fm" => {
            let (carrier, rate) = (p.take("carrier")?, p.take("rate")?);
            let (depth, dur) = (p.take("depth")?, p.take("dur")?);
            gen_fm_sinusoid(carrier, rate, depth, dur, SAMPLE_RATE)
        }
        "impulse" => {
            let (pos, dur) = (p.take("pos")?, p.take("dur")?);
            gen_impulse(pos, dur, SAMPLE_RATE)
        }
        other => bail!("unknown generator '{other}': {GRAMMAR}"),
    };
    p.finish()?;
    Ok(signal?)
}
