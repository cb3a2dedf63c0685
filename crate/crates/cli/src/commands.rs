use std::collections::HashSet;
use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use itertools::Itertools;
use rinr_core::codec::{
    compute_residual, crop, decode, decode_background, encode, entropy, psnr, psnr_outside, Image,
    ObjectSizeTable,
};
use rinr_core::comm::{fog_total, optimize_routes, training_location, transfer_time};
use rinr_core::inr::{FitReport, MlpArchitecture, TrainConfig};
use rinr_core::quant::{pack, unpack, BitWidth, PackPolicy};
use rinr_core::sched::{
    decode_planned, group_by_arch, plan_latency, random_plan, sequential_plan, DecodeJob,
    LatencyModel, PlanJob,
};

use crate::io::{read_image, write_image};
use crate::text::{fmt_real, parse_devices, parse_manifest, parse_path_list};
use crate::{CliError, DecodeArgs, EncodeArgs, EvalArgs, GroupSimArgs, PlanArgs, StatsArgs};

fn runtime(e: impl Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn usage(e: impl Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn emit(out: &mut dyn Write, line: &str) -> Result<(), CliError> {
    writeln!(out, "{line}").map_err(runtime)
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn opt_real(v: Option<f64>) -> String {
    v.map_or_else(|| "na".to_owned(), fmt_real)
}

fn bit_width(bits: u8) -> Result<BitWidth, CliError> {
    BitWidth::from_bits(bits).map_err(usage)
}

fn write_fit_report(path: &Path, bg: &FitReport, obj: &FitReport) -> Result<(), CliError> {
    let mut csv = String::from("network,step,loss\n");
    for (name, report) in [("background", bg), ("object", obj)] {
        for (i, loss) in report.loss_trace.iter().enumerate() {
            csv.push_str(&format!("{name},{},{}\n", i + 1, fmt_real(*loss)));
        }
    }
    fs::write(path, csv).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

pub fn cmd_encode(a: &EncodeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let table = if a.obj_arch.eq_ignore_ascii_case("auto") {
        ObjectSizeTable::default()
    } else {
        let arch: MlpArchitecture = a.obj_arch.parse().map_err(usage)?;
        ObjectSizeTable::new(Vec::new(), arch).map_err(usage)?
    };
    let cfg_bg = TrainConfig::background()
        .with_steps(a.bg_steps)
        .with_seed(a.seed)
        .with_learning_rate(a.lr);
    let cfg_obj = TrainConfig::object()
        .with_steps(a.obj_steps)
        .with_seed(a.seed.wrapping_add(1))
        .with_learning_rate(a.lr);
    cfg_bg.validate().map_err(usage)?;
    let policy = PackPolicy {
        background: bit_width(a.bg_bits)?,
        object: bit_width(a.obj_bits)?,
    };

    let image = read_image(&a.input)?;
    let (encoded, bg_report, obj_report) = encode(
        &image, &a.bbox, &a.bg_arch, &table, &cfg_bg, &cfg_obj, a.mode,
    )
    .map_err(runtime)?;
    let bytes = pack(&encoded, policy).map_err(runtime)?;
    fs::write(&a.out, &bytes).map_err(|e| runtime(format!("{}: {e}", a.out.display())))?;
    let report_path = a.report.clone().unwrap_or_else(|| {
        let mut p = a.out.clone().into_os_string();
        p.push(".fit.csv");
        PathBuf::from(p)
    });
    write_fit_report(&report_path, &bg_report, &obj_report)?;

    // Quality of what was actually stored, after quantization.
    let decoded = decode(&unpack(&bytes).map_err(runtime)?).map_err(runtime)?;
    let full = psnr(&image, &decoded, None).map_err(runtime)?;
    let object = psnr(&image, &decoded, Some(&a.bbox)).map_err(runtime)?;
    let background = psnr_outside(&image, &decoded, &a.bbox).map_err(runtime)?;
    emit(
        out,
        "output,bytes,bg_arch,obj_arch,mode,full_psnr_db,object_psnr_db,background_psnr_db",
    )?;
    emit(
        out,
        &format!(
            "{},{},{},{},{},{},{},{}",
            a.out.display(),
            bytes.len(),
            encoded.bg_arch,
            encoded.obj_arch,
            encoded.obj_mode,
            fmt_real(full),
            fmt_real(object),
            opt_real(background)
        ),
    )
}

fn load_container(path: &Path) -> Result<rinr_core::codec::EncodedImage, CliError> {
    let bytes = fs::read(path).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    unpack(&bytes).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

pub fn cmd_decode(a: &DecodeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.threads == 0 {
        return Err(usage("--threads must be at least 1"));
    }
    match (&a.input, &a.batch) {
        (Some(input), None) => {
            let target = a.out.as_ref().ok_or_else(|| usage("--input needs --out"))?;
            let encoded = load_container(input)?;
            let image = if a.background_only {
                decode_background(&encoded)
            } else {
                decode(&encoded)
            }
            .map_err(runtime)?;
            write_image(target, &image)?;
            emit(out, "output,width,height")?;
            emit(
                out,
                &format!("{},{},{}", target.display(), image.width(), image.height()),
            )
        }
        (None, Some(list)) => decode_list(a, list, out),
        _ => Err(usage("give exactly one of --input or --batch")),
    }
}

fn decode_list(a: &DecodeArgs, list: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let out_dir = a
        .out_dir
        .as_ref()
        .ok_or_else(|| usage("--batch needs --out-dir"))?;
    if a.background_only {
        return Err(usage("--background-only applies to single-file decode"));
    }
    let model = LatencyModel::new(a.latency_a, a.latency_b).map_err(usage)?;
    let base = list.parent().unwrap_or(Path::new("."));
    let mut seen = HashSet::new();
    let mut jobs = Vec::new();
    for entry in parse_path_list(&read_text(list)?) {
        let path = base.join(&entry);
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .ok_or_else(|| usage(format!("no file name in `{entry}`")))?;
        if !seen.insert(id.clone()) {
            return Err(usage(format!("two inputs share the output name `{id}`")));
        }
        // Every container is loaded before decoding starts.
        jobs.push(DecodeJob::new(id, Arc::new(load_container(&path)?)));
    }
    let plan_jobs: Vec<PlanJob> = jobs.iter().map(DecodeJob::plan_job).collect();
    let plan = group_by_arch(&plan_jobs, a.batch_size, a.seed, a.policy.into()).map_err(usage)?;
    let images = decode_planned(&jobs, &plan, a.threads).map_err(runtime)?;

    fs::create_dir_all(out_dir).map_err(|e| runtime(format!("{}: {e}", out_dir.display())))?;
    let mut batch_of = vec![0; jobs.len()];
    for (b, batch) in plan.batches.iter().enumerate() {
        for &j in batch {
            batch_of[j] = b;
        }
    }
    emit(out, "image_id,batch,output")?;
    for ((job, image), b) in jobs.iter().zip(&images).zip(&batch_of) {
        let target = out_dir.join(format!("{}.{}", job.image_id, a.format.extension()));
        write_image(&target, image)?;
        emit(out, &format!("{},{b},{}", job.image_id, target.display()))?;
    }
    let grouped = plan_latency(&plan, &plan_jobs, &model).map_err(runtime)?;
    let order: Vec<usize> = (0..jobs.len()).collect();
    let listed = sequential_plan(&order, a.batch_size).map_err(usage)?;
    let listed = plan_latency(&listed, &plan_jobs, &model).map_err(runtime)?;
    emit(out, "")?;
    emit(
        out,
        "jobs,batches,batch_size,threads,grouped_latency,list_order_latency",
    )?;
    emit(
        out,
        &format!(
            "{},{},{},{},{},{}",
            jobs.len(),
            plan.batches.len(),
            a.batch_size,
            a.threads,
            fmt_real(grouped),
            fmt_real(listed)
        ),
    )
}

fn same_size(a: &Image, b: &Image) -> Result<(), CliError> {
    if a.same_dims(b) {
        Ok(())
    } else {
        Err(runtime(format!(
            "image sizes differ: {}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )))
    }
}

pub fn cmd_eval(a: &EvalArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let raw = read_image(&a.raw)?;
    let decoded = read_image(&a.decoded)?;
    same_size(&raw, &decoded)?;
    let full = psnr(&raw, &decoded, None).map_err(runtime)?;
    let object = psnr(&raw, &decoded, Some(&a.bbox)).map_err(runtime)?;
    let background = psnr_outside(&raw, &decoded, &a.bbox).map_err(runtime)?;
    emit(out, "full_psnr_db,object_psnr_db,background_psnr_db")?;
    emit(
        out,
        &format!(
            "{},{},{}",
            fmt_real(full),
            fmt_real(object),
            opt_real(background)
        ),
    )
}

pub fn cmd_stats(a: &StatsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.bins == 0 {
        return Err(usage("--bins must be at least 1"));
    }
    let raw = read_image(&a.raw)?;
    let background = read_image(&a.background)?;
    same_size(&raw, &background)?;
    let raw_patch = crop(&raw, &a.bbox).map_err(runtime)?;
    let bg_patch = crop(&background, &a.bbox).map_err(runtime)?;
    let residual = compute_residual(&raw_patch, &bg_patch).map_err(runtime)?;
    let h_raw = entropy(raw_patch.data(), a.bins).map_err(runtime)?;
    let h_res = entropy(residual.stored(), a.bins).map_err(runtime)?;
    emit(out, "bins,raw_entropy_bits,residual_entropy_bits")?;
    emit(
        out,
        &format!("{},{},{}", a.bins, fmt_real(h_raw), fmt_real(h_res)),
    )
}

pub fn cmd_plan(a: &PlanArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let source = a.devices.display().to_string();
    let devices = parse_devices(&read_text(&a.devices)?, &source)?;
    let plan = optimize_routes(&devices, a.alpha, a.bandwidth).map_err(usage)?;
    let report = fog_total(&devices, &plan).map_err(runtime)?;

    emit(out, "id,payload_bytes,receiver_count,route,saving_bytes")?;
    for (d, r) in devices.iter().zip(&report.devices) {
        emit(
            out,
            &format!(
                "{},{},{},{},{}",
                d.id, d.payload_bytes, d.receiver_count, r.route, r.saving
            ),
        )?;
    }
    emit(out, "")?;
    let mut header = String::from(
        "alpha,devices,fog_routes,d_s,m1,m2,m3,d_f,savings,ratio,serverless_time_s,fog_time_s",
    );
    let mut row = format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        fmt_real(a.alpha.value()),
        devices.len(),
        plan.fog_count(),
        report.serverless,
        report.m1,
        report.m2,
        report.m3,
        report.fog_total,
        report.savings,
        fmt_real(report.ratio),
        fmt_real(transfer_time(report.serverless, &plan)),
        fmt_real(transfer_time(report.fog_total, &plan)),
    );
    if let (Some(model), Some(data)) = (a.model_bytes, a.data_bytes) {
        header.push_str(",model_bytes,data_bytes,training_location");
        row.push_str(&format!(
            ",{model},{data},{}",
            training_location(data, model)
        ));
    }
    emit(out, &header)?;
    emit(out, &row)
}

/// Up to this many jobs, every ungrouped order is evaluated.
const EXHAUSTIVE_LIMIT: usize = 8;

pub fn cmd_group_sim(a: &GroupSimArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let source = a.manifest.display().to_string();
    let jobs = parse_manifest(&read_text(&a.manifest)?, &source)?;
    if jobs.is_empty() {
        return Err(usage(format!("{source}: no jobs")));
    }
    if a.batch_size == 0 {
        return Err(usage("--batch-size must be at least 1"));
    }
    let model = LatencyModel::new(a.latency_a, a.latency_b).map_err(usage)?;
    let plan = group_by_arch(&jobs, a.batch_size, a.seed, a.policy.into()).map_err(usage)?;
    let grouped = plan_latency(&plan, &jobs, &model).map_err(runtime)?;

    let n = jobs.len();
    let exhaustive = n <= EXHAUSTIVE_LIMIT;
    let ungrouped: Vec<f64> = if exhaustive {
        (0..n)
            .permutations(n)
            .map(|order| {
                let p = sequential_plan(&order, a.batch_size)?;
                plan_latency(&p, &jobs, &model)
            })
            .collect::<Result<_, _>>()
            .map_err(runtime)?
    } else {
        if a.samples == 0 {
            return Err(usage("--samples must be at least 1"));
        }
        (0..a.samples as u64)
            .map(|i| {
                let p = random_plan(n, a.batch_size, a.seed.wrapping_add(i))?;
                plan_latency(&p, &jobs, &model)
            })
            .collect::<Result<_, _>>()
            .map_err(runtime)?
    };
    let worst = ungrouped.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = ungrouped.iter().sum::<f64>() / ungrouped.len() as f64;
    emit(
        out,
        "jobs,batch_size,batches,grouped_latency,ungrouped_worst,ungrouped_mean,ungrouped_plans,exhaustive,worst_over_grouped,mean_over_grouped",
    )?;
    emit(
        out,
        &format!(
            "{n},{},{},{},{},{},{},{exhaustive},{},{}",
            a.batch_size,
            plan.batches.len(),
            fmt_real(grouped),
            fmt_real(worst),
            fmt_real(mean),
            ungrouped.len(),
            fmt_real(worst / grouped),
            fmt_real(mean / grouped)
        ),
    )
}
