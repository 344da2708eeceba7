package corpus.dataclass.smelly;

public class CustomerRecord {
    private String name;
    private int birthYear;

    public CustomerRecord(String name, int birthYear) {
        this.name = name;
        this.birthYear = birthYear;
    }

    public String getName() {
        return name;
    }

    public int getBirthYear() {
        return birthYear;
    }

    public void setBirthYear(int birthYear) {
        this.birthYear = birthYear;
    }
}

class CustomerPrinter {
    String describe(CustomerRecord record, int year) {
        int age = year - record.getBirthYear();
        return record.getName() + " (" + age + ")";
    }
}
