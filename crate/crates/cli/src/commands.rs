//! One report builder per subcommand.

use std::fs;
use std::io::BufWriter;
use std::path::Path;

use netcap_core::ether::{self, FrameSpec, LinkRate};
use netcap_core::fabric::{self, ratio_to_f64, FabricPolicy, Rational, Topology};
use netcap_core::reno::{self, PathConfig};
use netcap_core::stat_mux::{self, QosSpec, Sidedness, SourceModel};
use netcap_core::traffic_sim::{self, SimRun};
use netcap_core::transport::{self, PathModel, TransportSpec, TCP_TIMESTAMPS};

use crate::report::{format_ratio, Cell, Report, Section};
use crate::{
    CliError, FabricArgs, FrameArgs, FramesArgs, GoodputArgs, MathisArgs, Proto, StatArgs,
    TcpSimArgs, EXIT_FINDINGS, EXIT_OK,
};

fn narrow(name: &str, value: u64) -> Result<u32, CliError> {
    u32::try_from(value).map_err(|_| CliError::Usage(format!("--{name} {value} is too large")))
}

fn build_frame(args: &FrameArgs) -> Result<(LinkRate, FrameSpec), CliError> {
    let link = LinkRate::new(args.link)?;
    let payload = narrow("payload", args.payload)?;
    let vlan = narrow("vlan", args.vlan)?;
    let frame = if args.jumbo {
        FrameSpec::jumbo(payload, vlan)?
    } else {
        FrameSpec::new(payload, vlan)?
    };
    Ok((link, frame))
}

fn frame_fields(link: LinkRate, frame: &FrameSpec) -> Vec<(&'static str, Cell)> {
    let rate = ether::max_frames_per_second(link, frame);
    vec![
        ("link", Cell::rate(link.bits_per_second())),
        ("payload", Cell::count(u64::from(frame.payload()), "B")),
        ("vlan_tags", Cell::count(u64::from(frame.vlan_tags()), "")),
        (
            "frame_bytes",
            Cell::count(u64::from(frame.physical_size()), "B"),
        ),
        ("frames_per_second", Cell::count(rate.whole, "f/s")),
        ("frames_per_second_exact", Cell::real(rate.exact, 3, "f/s")),
    ]
}

pub fn stat(args: &StatArgs) -> Result<Report, CliError> {
    let convention = if args.one_sided {
        Sidedness::OneSided
    } else {
        Sidedness::TwoSided
    };
    let model = SourceModel::new(args.sources, args.rate, 1.0)?;
    let qos = QosSpec::new(args.epsilon, convention)?;
    let est = stat_mux::stat_capacity(&model, &qos);
    let mut report = Report::new("stat").with(Section::record(
        "capacity",
        vec![
            ("sources", Cell::count(args.sources, "")),
            ("peak_rate", Cell::rate(args.rate)),
            ("epsilon", Cell::real(args.epsilon, 4, "")),
            (
                "convention",
                Cell::text(if args.one_sided {
                    "one-sided"
                } else {
                    "two-sided"
                }),
            ),
            ("c_epsilon", Cell::real(qos.c_epsilon(), 4, "")),
            ("s_max", Cell::rate(est.s_max)),
            ("c_max", Cell::rate(est.c_max)),
            ("c_mean", Cell::rate(est.c_mean)),
            ("c_stat", Cell::rate(est.c_stat)),
        ],
    ));
    if args.validate {
        let sim = SimRun {
            model,
            trials: args.trials,
            seed: args.seed,
            capacity: Some(est.c_stat),
        };
        let summary = traffic_sim::run(&sim)?;
        let target = match convention {
            Sidedness::TwoSided => args.epsilon / 2.0,
            Sidedness::OneSided => args.epsilon,
        };
        report = report.with(Section::record(
            "validation",
            vec![
                ("trials", Cell::count(summary.trials, "")),
                ("seed", Cell::count(args.seed, "")),
                ("mean", Cell::rate(summary.mean)),
                ("stddev", Cell::rate(summary.stddev)),
                ("max_observed", Cell::rate(summary.max_observed)),
                (
                    "exceedance_rate",
                    Cell::real(summary.exceedance_rate, 6, ""),
                ),
                ("target_rate", Cell::real(target, 6, "")),
            ],
        ));
    }
    Ok(report)
}

pub fn frames(args: &FramesArgs) -> Result<Report, CliError> {
    let (link, frame) = build_frame(&args.frame)?;
    Ok(Report::new("frames").with(Section::record("frames", frame_fields(link, &frame))))
}

fn tcp_options(text: &str) -> Result<u32, CliError> {
    match text {
        "none" => Ok(0),
        "timestamps" => Ok(TCP_TIMESTAMPS),
        other => other
            .parse::<u32>()
            .ok()
            .filter(|b| b % 4 == 0 && *b <= 40)
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "--options `{other}` must be none, timestamps or a multiple of 4 up to 40"
                ))
            }),
    }
}

pub fn goodput(args: &GoodputArgs) -> Result<Report, CliError> {
    let (link, frame) = build_frame(&args.frame)?;
    let mut fields = frame_fields(link, &frame);
    match args.proto {
        Proto::Ethernet => {
            fields.push(("proto", Cell::text("ethernet")));
            fields.push((
                "goodput_with_crc",
                Cell::rate(ether::ethernet_goodput(link, &frame, true)),
            ));
            fields.push((
                "goodput_without_crc",
                Cell::rate(ether::ethernet_goodput(link, &frame, false)),
            ));
        }
        Proto::Tcp | Proto::Udp => {
            let spec = if args.proto == Proto::Udp {
                TransportSpec::udp()
            } else {
                TransportSpec {
                    tcp_options: tcp_options(&args.options)?,
                    ..TransportSpec::tcp()
                }
            };
            let name = if args.proto == Proto::Udp {
                "udp"
            } else {
                "tcp"
            };
            fields.push(("proto", Cell::text(name)));
            fields.push((
                "header_bytes",
                Cell::count(u64::from(spec.header_bytes()), "B"),
            ));
            fields.push((
                "app_bytes",
                Cell::count(u64::from(spec.app_bytes(frame.payload())?), "B"),
            ));
            fields.push((
                "goodput",
                Cell::rate(transport::transport_goodput(link, &frame, &spec)?),
            ));
        }
    }
    Ok(Report::new("goodput").with(Section::record("goodput", fields)))
}

pub fn mathis(args: &MathisArgs) -> Result<Report, CliError> {
    let mut path = PathModel::new(args.mss, args.rtt, args.loss)?;
    if let Some(window) = args.window {
        if window.is_nan() || window <= 0.0 {
            return Err(CliError::Usage(format!(
                "--window {window} must be positive"
            )));
        }
        path = path.with_window(window);
    }
    let mut fields = vec![
        ("mss", Cell::real(args.mss, 0, "B")),
        ("rtt", Cell::real(args.rtt, 4, "s")),
        ("loss", Cell::real(args.loss, 6, "")),
        (
            "window_segments",
            Cell::real(transport::mathis_window(args.loss)?, 2, ""),
        ),
        (
            "throughput",
            Cell::rate(transport::mathis_throughput(&path)),
        ),
    ];
    if let Some(window) = args.window {
        fields.push((
            "window_limit",
            Cell::rate(transport::window_throughput(window, args.rtt)?),
        ));
    }
    Ok(Report::new("mathis").with(Section::record("mathis", fields)))
}

pub fn tcp_sim(args: &TcpSimArgs) -> Result<Report, CliError> {
    let mut config = PathConfig::new(args.smss, args.rtt, args.loss, args.rounds, args.seed);
    if let Some(rwnd) = args.rwnd {
        config.rwnd = rwnd;
    }
    config.bottleneck = args.bottleneck;
    let summary = reno::run(&config)?;
    if let Some(path) = &args.trace {
        write_trace(path, &summary)?;
    }
    let mut fields = vec![
        ("smss", Cell::count(args.smss, "B")),
        ("rtt", Cell::real(args.rtt, 4, "s")),
        ("loss", Cell::real(args.loss, 6, "")),
        ("rounds", Cell::count(summary.rounds, "")),
        ("seed", Cell::count(args.seed, "")),
        ("delivered", Cell::count(summary.delivered, "B")),
        ("throughput", Cell::rate(summary.throughput)),
        ("segments_sent", Cell::count(summary.segments_sent, "")),
        ("segments_lost", Cell::count(summary.segments_lost, "")),
        ("retransmits", Cell::count(summary.retransmits, "")),
        ("timeouts", Cell::count(summary.timeouts, "")),
        (
            "loss_events",
            Cell::count(summary.loss_events.len() as u64, ""),
        ),
    ];
    if args.loss > 0.0 {
        let path = PathModel::new(args.smss as f64, args.rtt, args.loss)?;
        let predicted = transport::mathis_throughput(&path);
        fields.push(("mathis_throughput", Cell::rate(predicted)));
        fields.push((
            "ratio_to_mathis",
            Cell::real(summary.throughput / predicted, 3, ""),
        ));
    }
    Ok(Report::new("tcp-sim").with(Section::record("simulation", fields)))
}

fn write_trace(path: &Path, summary: &reno::TraceSummary) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(io)?;
    reno::write_trace_csv(summary, BufWriter::new(file)).map_err(io)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn ratio_cell(ratio: Option<&Rational>) -> Cell {
    match ratio {
        Some(r) => {
            let value = ratio_to_f64(r);
            Cell::Figure {
                value: crate::report::Number::Float(value),
                display: format_ratio(value),
            }
        }
        None => Cell::text("-"),
    }
}

fn exact(ratio: Option<&Rational>) -> Cell {
    match ratio {
        Some(r) if *r.denom() == 1 => Cell::text(r.numer().to_string()),
        Some(r) => Cell::text(format!("{}/{}", r.numer(), r.denom())),
        None => Cell::text("-"),
    }
}

pub fn fabric(args: &FabricArgs) -> Result<(Report, i32), CliError> {
    let topology = Topology::from_json(&read(&args.topology)?)?;
    let policy = match &args.policy {
        Some(path) => FabricPolicy::from_json(&read(path)?)?,
        None => FabricPolicy::default(),
    };
    let audit = fabric::audit(&topology, &policy)?;

    let mut groups = Section::new(
        "groups",
        vec![
            "node",
            "tier",
            "upstream_tier",
            "downstream_bps",
            "upstream_bps",
            "ratio",
            "ratio_exact",
            "threshold",
            "verdict",
        ],
    );
    for g in &audit.groups {
        groups.push(vec![
            Cell::text(g.node.clone()),
            Cell::text(g.tier.as_str()),
            Cell::text(g.upstream_tier.map_or("-", |t| t.as_str())),
            Cell::exact_rate(g.downstream_bps),
            Cell::exact_rate(g.upstream_bps),
            ratio_cell(g.ratio.as_ref()),
            exact(g.ratio.as_ref()),
            ratio_cell(g.threshold.as_ref()),
            Cell::text(g.verdict.as_str()),
        ]);
    }
    let mut report = Report::new("fabric").with(groups);
    if let (Some(params), Some(clos)) = (&topology.clos, &audit.clos) {
        report = report.with(Section::record(
            "clos",
            vec![
                ("n", Cell::count(params.n, "")),
                ("r", Cell::count(params.r, "")),
                ("k", Cell::count(params.k, "")),
                ("ratio", ratio_cell(Some(&clos.ratio))),
                ("ratio_exact", exact(Some(&clos.ratio))),
                ("max_ratio", ratio_cell(Some(&clos.max_ratio))),
                ("strict_sense", Cell::Flag(clos.strict_sense)),
                ("verdict", Cell::text(clos.verdict.as_str())),
            ],
        ));
    }
    let findings = audit.has_findings();
    report = report.with(Section::record(
        "summary",
        vec![
            ("groups", Cell::count(audit.groups.len() as u64, "")),
            ("findings", Cell::Flag(findings)),
        ],
    ));
    Ok((report, if findings { EXIT_FINDINGS } else { EXIT_OK }))
}
