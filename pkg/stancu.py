# stancu.py
# Точка входа CLI: численная проверка операторов Станку-Бета и их q-аналогов.
#
# Команды:
# - moments      интегралы на 1, t, t^2 против замкнутых форм моментов
# - converge     ошибки Коровкина вдоль n при q = q_n (sup и взвешенная нормы)
# - bounds       поточечные оценки через модуль непрерывности и класс Липшица
# - statistical  условия статистической сходимости для последовательности q_n
# - compare      сравнение четырёх видов операторов на корпусе функций
# - history      последние прогоны из архива (DATABASE_URL / --db)
#
# Отчёт пишется в stdout (или --out) как CSV или JSON, логи идут в stderr.
# Код выхода: 0: все проверки прошли, 1: есть проваленные строки,
# 2: ошибка конфигурации, 3: ошибка вычислений.
#
# Запуск:
#   pip install -r requirements.txt
#   python stancu.py moments --operator qsb --n 5,10 --q 0.5,0.9
#   python stancu.py converge --n 10,100,1000,10000 --format json

import argparse
import json
import logging
import re
import sys
from typing import List, Optional

from config import get_settings
from handlers import get_handlers
from handlers.run_config import COMMANDS, FORMATS, RunConfig
from services.archive import list_runs, save_report
from services.convergence import Grid
from services.errors import ConfigError, DomainError, StancuError
from services.operators import Variant
from services.statconv import SEQUENCES

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED_ROWS, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _numbers(kind):
    def parse(text: str):
        parts = [p for p in re.split(r"[,\s]+", text.strip()) if p]
        try:
            return tuple(kind(p) for p in parts)
        except ValueError:
            raise argparse.ArgumentTypeError(f"ожидался список чисел, получено {text!r}")
    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stancu", description="Stancu-Beta operators and their q-analogues")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--operator", choices=[v.value for v in Variant], default=Variant.CAI_PRESERVING.value)
    parser.add_argument("--n", dest="n_ladder", type=_numbers(int), default=None, help="например 5,10,50")
    parser.add_argument("--q", dest="q_values", type=_numbers(float), default=None, help="например 0.5,0.9")
    parser.add_argument("--x", dest="x_points", type=_numbers(float), default=None)
    parser.add_argument("--grid-min", type=float, default=0.0)
    parser.add_argument("--grid-max", type=float, default=5.0)
    parser.add_argument("--grid-points", type=int, default=501)
    parser.add_argument("--sequence", choices=sorted(SEQUENCES), default="standard")
    parser.add_argument("--horizon", type=int, default=10**6)
    parser.add_argument("--A", dest="A", type=float, default=1.0)
    parser.add_argument("--E", dest="E", type=_numbers(float), default=None, help="по умолчанию узлы сетки")
    parser.add_argument("--exact", action="store_true", help="моменты решётки вместо замкнутых форм")
    parser.add_argument("--format", dest="output_format", choices=FORMATS, default="csv")
    parser.add_argument("--out", dest="output_path", default=None)
    parser.add_argument("--db", dest="db_url", default=None)
    parser.add_argument("--limit", type=int, default=20, help="history: сколько прогонов показать")
    return parser


def build_config(args: argparse.Namespace, settings) -> RunConfig:
    try:
        grid = Grid(args.grid_min, args.grid_max, args.grid_points)
    except DomainError as e:
        raise ConfigError(str(e))
    fields = dict(
        command=args.command,
        operator=args.operator,
        grid=grid,
        sequence=args.sequence,
        horizon=args.horizon,
        A=args.A,
        E=args.E,
        exact=args.exact,
        output_format=args.output_format,
        output_path=args.output_path,
        db_url=args.db_url or settings.database_url,
        settings=settings,
        n_ladder=args.n_ladder if args.n_ladder is not None else tuple(settings.default_n_ladder),
        q_values=args.q_values if args.q_values is not None else tuple(settings.default_q_values),
    )
    if args.x_points is not None:
        fields["x_points"] = args.x_points
    return RunConfig(**fields)


def _history(config: RunConfig, limit: int) -> int:
    if not config.db_url:
        print("⚠️ Архив отключён: задайте DATABASE_URL или --db", file=sys.stderr)
        return EXIT_CONFIG
    runs = list_runs(config.db_url, limit)
    if config.output_format == "json":
        json.dump(runs, sys.stdout, ensure_ascii=False, indent=2)
        sys.stdout.write("\n")
    else:
        for r in runs:
            mark = "✅" if r["passed"] else "❌"
            print(f"{mark} #{r['id']} {r['created_at']} {r['command']} rows={r['rows']}")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = get_settings()
    except ConfigError as e:
        print(f"❌ Ошибка конфигурации: {e}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        level=getattr(logging, settings.log_level, logging.INFO),
        stream=sys.stderr,
    )
    try:
        config = build_config(args, settings)
    except ConfigError as e:
        print(f"❌ Ошибка конфигурации: {e}", file=sys.stderr)
        return EXIT_CONFIG

    if config.command == "history":
        return _history(config, args.limit)

    try:
        report = get_handlers()[config.command](config)
    except ConfigError as e:
        print(f"❌ Ошибка конфигурации: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except StancuError as e:
        logger.exception("%s failed", config.command)
        print(f"❌ Ошибка вычислений: {e}", file=sys.stderr)
        return EXIT_NUMERIC

    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8", newline="") as stream:
            report.write(stream, config.output_format)
    else:
        report.write(sys.stdout, config.output_format)

    if config.db_url:
        try:
            save_report(report, config.db_url)
        except Exception:
            logger.exception("archiving failed")

    summary = report.summary()
    logger.info("%s: %d rows, %d failed", config.command, summary["rows"], summary["failed"])
    return EXIT_OK if report.passed else EXIT_FAILED_ROWS


if __name__ == "__main__":
    sys.exit(main())
