use anyhow::Result;

use crate::config::ExperimentConfig;
use crate::output::OutputDir;
use crate::{Cli, Command, Context};

mod analyze;
mod attack;
mod bounds;
mod homophonic;
mod nishioka;
mod simulate;

pub(crate) fn dispatch(cli: &Cli, config: &ExperimentConfig, ctx: &Context) -> Result<()> {
    match &cli.command {
        Command::Simulate => {
            config.simulate.validate()?;
            let seed = ctx.require_seed()?;
            let mut out = OutputDir::create(&cli.out)?;
            simulate::run(&config.simulate, seed, &mut out)?;
            out.finish("simulate", Some(seed), ctx.threads, &config.simulate)
        }
        Command::Attack => {
            config.attack.validate()?;
            let seed = ctx.require_seed()?;
            let mut out = OutputDir::create(&cli.out)?;
            attack::run(&config.attack, seed, &mut out)?;
            out.finish("attack", Some(seed), ctx.threads, &config.attack)
        }
        Command::Analyze => {
            config.analyze.validate()?;
            let mut out = OutputDir::create(&cli.out)?;
            analyze::run(&config.analyze, &mut out)?;
            out.finish("analyze", ctx.seed, ctx.threads, &config.analyze)
        }
        Command::Bounds => {
            config.bounds.validate()?;
            let mut out = OutputDir::create(&cli.out)?;
            bounds::run(&config.bounds, &mut out)?;
            out.finish("bounds", ctx.seed, ctx.threads, &config.bounds)
        }
        Command::Homophonic(args) => {
            config.homophonic.validate()?;
            let mut out = OutputDir::create(&cli.out)?;
            homophonic::run(&config.homophonic, args, ctx, &mut out)?;
            out.finish("homophonic", ctx.seed, ctx.threads, &config.homophonic)
        }
        Command::Nishioka => {
            config.nishioka.validate()?;
            let seed = ctx.require_seed()?;
            let mut out = OutputDir::create(&cli.out)?;
            nishioka::run(&config.nishioka, seed, &mut out)?;
            out.finish("nishioka", Some(seed), ctx.threads, &config.nishioka)
        }
    }
}
